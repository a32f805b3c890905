#include "hubbard/spectra.hpp"

#include <cmath>

namespace hubbard {

PerturbationCoefficients perturbation_coefficients(const SymmetricSubspace& s, double j, double u) {
  const auto spec = diagonalize(s.hubbard(j, u));
  Eigen::VectorXd g = spec.vectors.col(0);
  if (g(0) < 0) g = -g;
  PerturbationCoefficients out;
  out.c.assign(g.data(), g.data() + g.size());
  out.outside_window = !(std::abs(j / u) < 0.2);
  return out;
}

PairAmplitude pair_amplitude(const SymmetricSubspace& s, double j, double u, int n_pairs,
                             PairLabel label) {
  if (n_pairs < 1 || n_pairs > s.max_pairs())
    throw std::invalid_argument("pair_amplitude: n_pairs must lie in [1, " +
                                std::to_string(s.max_pairs()) + "]");
  const auto spec = diagonalize(s.hubbard(j, u));
  const Eigen::VectorXd g = spec.vectors.col(0);
  const Eigen::VectorXd tg = s.t_reduced * g;

  PairAmplitude out;
  if (label == PairLabel::highest) {
    out.label = spec.values.size() - 1;
  } else {
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(spec.values.size());
    for (Index i = 0; i < s.dim(); ++i)
      if (s.doublon_counts[static_cast<std::size_t>(i)] == n_pairs)
        weight += spec.vectors.row(i).transpose().cwiseAbs2();
    Index best = 0, second = -1;
    for (Index k = 1; k < weight.size(); ++k) {
      if (weight(k) > weight(best)) {
        second = best;
        best = k;
      } else if (second < 0 || weight(k) > weight(second)) {
        second = k;
      }
    }
    out.label = best;
    if (second >= 0 && weight(best) - weight(second) < 0.01 * weight(best)) {
      out.ambiguous = true;
      out.alternative = spec.vectors.col(second).dot(tg);
    }
  }
  out.value = spec.vectors.col(out.label).dot(tg);
  out.excitation_energy = spec.values(out.label) - spec.values(0);
  return out;
}

ScalingFit scaling_fit(std::span<const double> x, std::span<const double> y,
                       double zero_tolerance) {
  if (x.size() != y.size()) throw std::invalid_argument("scaling_fit: length mismatch");
  if (x.size() < 6) throw std::invalid_argument("scaling_fit: need at least 6 points");
  ScalingFit fit;
  fit.points = static_cast<int>(x.size());
  fit.window_lo = *std::min_element(x.begin(), x.end());
  fit.window_hi = *std::max_element(x.begin(), x.end());
  for (double v : y)
    if (!(std::abs(v) > zero_tolerance)) {
      fit.identically_zero = true;
      return fit;
    }

  const auto n = static_cast<Index>(x.size());
  Eigen::VectorXd lx(n), ly(n);
  for (Index i = 0; i < n; ++i) {
    if (!(x[static_cast<std::size_t>(i)] > 0)) throw std::invalid_argument("scaling_fit: x <= 0");
    lx(i) = std::log(x[static_cast<std::size_t>(i)]);
    ly(i) = std::log(std::abs(y[static_cast<std::size_t>(i)]));
  }
  const double mx = lx.mean(), my = ly.mean();
  const Eigen::VectorXd dx = lx.array() - mx, dy = ly.array() - my;
  fit.exponent = dx.dot(dy) / dx.squaredNorm();
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  const double ss_res = (dy - fit.exponent * dx).squaredNorm();
  const double ss_tot = dy.squaredNorm();
  fit.r_squared = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("linear_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

std::vector<PairAmplitude> amplitude_scan(const SymmetricSubspace& s, int n_pairs,
                                          std::span<const double> j_over_u, PairLabel label) {
  std::vector<PairAmplitude> out;
  out.reserve(j_over_u.size());
  for (double x : j_over_u) out.push_back(pair_amplitude(s, x, 1.0, n_pairs, label));
  return out;
}

AmplitudeMaximum amplitude_maximum(const SymmetricSubspace& s, int n_pairs,
                                   std::span<const double> grid) {
  std::vector<double> default_grid;
  if (grid.empty()) {
    for (int i = 1; i <= 150; ++i) default_grid.push_back(0.01 * i);
    grid = default_grid;
  }
  const auto amps = amplitude_scan(s, n_pairs, grid);
  std::vector<double> p;
  for (const auto& a : amps) p.push_back(std::norm(a.value));

  const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  AmplitudeMaximum out;
  out.argmax = grid[best];
  out.max_value = p[best];
  out.interior = best > 0 && best + 1 < p.size();
  const double slack = 1e-14 * p[best];
  out.unimodal = true;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (i < best && p[i + 1] < p[i] - slack) out.unimodal = false;
    if (i >= best && p[i + 1] > p[i] + slack) out.unimodal = false;
  }
  return out;
}

SquareDoublePair square_double_pair(const SymmetricSubspace& square, double j_over_u) {
  SquareDoublePair out;
  {
    const auto spec = diagonalize(square.hubbard(j_over_u, 1.0));
    const Index top = spec.values.size() - 1;
    out.krylov_element = spec.vectors.col(top).dot(square.t_reduced * spec.vectors.col(0));
  }
  const Operator<double> t = hopping_sum<double>(square.graph, square.basis);
  const Operator<double> h = build_hubbard<double>(square.graph, {j_over_u, 1.0}, square.basis);
  const Eigen::VectorXd d = doublon_counts(square.basis);
  const auto spec = diagonalize(h);
  const Eigen::VectorXd tg = t * spec.vectors.col(0);
  const Index top = spec.values.size() - 1;
  out.exact_element = spec.vectors.col(top).dot(tg);
  for (Index k = 0; k < spec.values.size(); ++k) {
    const double dk = spec.vectors.col(k).cwiseAbs2().dot(d);
    if (dk > 1.5)
      out.exact_manifold_max = std::max(out.exact_manifold_max, std::abs(spec.vectors.col(k).dot(tg)));
  }
  return out;
}

}  // namespace hubbard
