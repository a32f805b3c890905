#pragma once

namespace hubbard::pump {

// SI 2019 exact values.
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kHbarEvSeconds = 6.582119569e-16;     // eV s

struct PumpFieldParams {
  double field_v_per_m = 0.0;     // E parallel to the lattice
  double spacing_m = 0.0;         // lattice constant
  double photon_energy_ev = 0.0;  // ħω
};

/// Peak Peierls phase q ℓ E / (ħ ω).
double phase_amplitude(const PumpFieldParams& p);
/// Same, with the photon energy given in joules.
double phase_amplitude_si(double field_v_per_m, double spacing_m, double photon_energy_j);

/// 𝔍₀ by its power series (|x| <= 8) or period-average quadrature beyond.
double bessel_j0(double x);

/// (1/T) ∫₀ᵀ cos(x sin ωt) dt by the trapezoidal rule, which converges
/// geometrically for this periodic integrand.
double bessel_j0_period_average(double x, int nodes = 0);

/// J0 𝔍₀(phi_max).
double effective_hopping(double j0, double phi_max);

/// First root of 𝔍₀, bracketed in [2, 3].
double first_bessel_zero();

struct SmallPhaseSuppression {
  double approx = 0.0;  // -phi²/4
  double exact = 0.0;   // 𝔍₀(phi) - 1
  double error = 0.0;   // approx - exact
  bool outside_window = false;  // phi > 0.5
};

SmallPhaseSuppression small_phase_suppression(double phi_max);

/// Minimal ħΔω in eV for a Gaussian pulse: ħ 4 ln 2 / Δt.
double bandwidth_limit_ev(double delta_t_fwhm_s);

/// cos(phi_max): instantaneous real part of the hopping at peak phase.
double peak_hopping_ratio(double phi_max);

}  // namespace hubbard::pump
