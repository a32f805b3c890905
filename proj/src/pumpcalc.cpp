#include "hubbard/pumpcalc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hubbard::pump {

double phase_amplitude(const PumpFieldParams& p) {
  return phase_amplitude_si(p.field_v_per_m, p.spacing_m, p.photon_energy_ev * kElementaryCharge);
}

double phase_amplitude_si(double field_v_per_m, double spacing_m, double photon_energy_j) {
  if (!(spacing_m > 0) || !(photon_energy_j > 0) || field_v_per_m < 0)
    throw std::invalid_argument("phase_amplitude: spacing and photon energy must be positive");
  return kElementaryCharge * spacing_m * field_v_per_m / photon_energy_j;
}

double bessel_j0_period_average(double x, int nodes) {
  if (nodes <= 0) nodes = 64 + 2 * static_cast<int>(std::ceil(std::abs(x)));
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k)
    sum += std::cos(x * std::sin(2.0 * std::numbers::pi * k / nodes));
  return sum / nodes;
}

double bessel_j0(double x) {
  if (std::abs(x) > 8.0) return bessel_j0_period_average(x);
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

double effective_hopping(double j0, double phi_max) {
  if (phi_max < 0) throw std::invalid_argument("effective_hopping: phi_max must be >= 0");
  return j0 * bessel_j0(phi_max);
}

double first_bessel_zero() {
  double lo = 2.0, hi = 3.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j0(mid) > 0) lo = mid;
    else hi = mid;
    if (mid == lo && mid == hi) break;
  }
  return 0.5 * (lo + hi);
}

SmallPhaseSuppression small_phase_suppression(double phi_max) {
  SmallPhaseSuppression s;
  s.approx = -0.25 * phi_max * phi_max;
  s.exact = bessel_j0(phi_max) - 1.0;
  s.error = s.approx - s.exact;
  s.outside_window = phi_max > 0.5;
  return s;
}

double bandwidth_limit_ev(double delta_t_fwhm_s) {
  if (!(delta_t_fwhm_s > 0)) throw std::invalid_argument("bandwidth_limit: delta_t must be > 0");
  return kHbarEvSeconds * 4.0 * std::numbers::ln2 / delta_t_fwhm_s;
}

double peak_hopping_ratio(double phi_max) { return std::cos(phi_max); }

}  // namespace hubbard::pump
