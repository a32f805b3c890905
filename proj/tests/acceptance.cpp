// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include "hubbard/dynamics.hpp"
#include "hubbard/parallel.hpp"
#include "hubbard/pumpcalc.hpp"
#include "hubbard/spectra.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace hubbard;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Eigen::MatrixXd ladder(int n, double j, double u) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n / 2 + 1, n / 2 + 1);
  if (n == 4) {
    m << 0, -4 * j, 0, -4 * j, u - 4 * j, -4 * j, 0, -4 * j, 2 * u;
  } else if (n == 6) {
    m << 0, -6 * j, 0, 0, -6 * j, u - 8 * j, -8 * j, 0, 0, -8 * j, 2 * u - 8 * j, -6 * j, 0, 0,
        -6 * j, 3 * u;
  } else {
    m << 0, -8 * j, 0, 0, 0, -8 * j, u - 12 * j, -12 * j, 0, 0, 0, -12 * j, 2 * u - 16 * j,
        -12 * j, 0, 0, 0, -12 * j, 3 * u - 12 * j, -8 * j, 0, 0, 0, -8 * j, 4 * u;
  }
  return m;
}

Verdict paper_matrices() {
  double worst = 0.0;
  for (int n : {4, 6, 8}) {
    const auto s = build_symmetric_subspace(n);
    for (auto [j, u] : {std::pair{1.0, 10.0}, {0.37, 1.3}})
      worst = std::max(worst, (s.hubbard(j, u) - ladder(n, j, u)).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-10, fmt("max entry deviation %.2e over N=4,6,8 at (J,U)=(1,10),(0.37,1.3)", worst)};
}

Verdict oracle_equivalence() {
  double worst = 0.0;
  for (int n : {4, 6, 8}) {
    const auto s = build_symmetric_subspace(n);
    for (double j : {0.05, 0.3, 0.7}) {
      const auto full = diagonalize(build_hubbard<double>(s.graph, {j, 1.0}, s.basis), false);
      const auto red = diagonalize(s.hubbard(j, 1.0), false);
      worst = std::max(worst, std::abs(full.values(0) - red.values(0)));
    }
  }
  return {worst < 1e-9, fmt("max |E_reduced - E_full| = %.2e (dims 36/400/4900)", worst)};
}

double exponent(const SymmetricSubspace& s, int pairs, double lo, double hi) {
  const auto x = log_grid(lo, hi, 10);
  std::vector<double> y;
  for (const auto& a : amplitude_scan(s, pairs, x)) y.push_back(std::abs(a.value));
  return scaling_fit(x, y, 0.0).exponent;
}

Verdict scaling_laws() {
  struct Channel {
    int n, pairs;
    double target, tol;
  };
  const Channel channels[] = {{4, 2, 2.0, 0.05}, {6, 3, 4.0, 0.1}, {8, 3, 4.0, 0.1}, {8, 4, 6.0, 0.15}};
  bool pass = true;
  std::string wide = "[0.01,0.1]:", narrow = "diagnostic [0.001,0.01]:";
  for (const auto& c : channels) {
    const auto s = build_symmetric_subspace(c.n);
    const double e = exponent(s, c.pairs, 0.01, 0.1);
    pass = pass && std::abs(e - c.target) <= c.tol;
    wide += fmt(" N=%d,n=%d %.3f (want %.1f)", c.n, c.pairs, e, c.target);
    narrow += fmt(" %.3f", exponent(s, c.pairs, 0.001, 0.01));
  }
  return {pass, wide + "; " + narrow};
}

Verdict square_null() {
  const auto sq = square_subspace();
  double worst = 0.0;
  for (int i = 1; i <= 150; ++i) {
    const auto r = square_double_pair(sq, 0.01 * i);
    worst = std::max({worst, std::abs(r.krylov_element), std::abs(r.exact_element), r.exact_manifold_max});
  }
  return {worst < 1e-10 && !oversized(sq),
          fmt("max 2-pair element %.2e over J/U = 0.01..1.5 (closure dim %ld)", worst, long(sq.dim()))};
}

Verdict maximum_location() {
  const auto m4 = amplitude_maximum(build_symmetric_subspace(4), 2);
  const auto m6 = amplitude_maximum(build_symmetric_subspace(6), 3);
  const auto m8 = amplitude_maximum(build_symmetric_subspace(8), 4);
  const bool pass = m4.interior && m4.unimodal && m4.argmax >= 0.15 && m4.argmax <= 0.45 &&
                    m6.argmax < m4.argmax && m8.argmax < m6.argmax;
  return {pass, fmt("argmax N=4: %.2f (unimodal %d), N=6: %.2f, N=8: %.2f", m4.argmax,
                    int(m4.unimodal), m6.argmax, m8.argmax)};
}

Verdict bessel() {
  double worst = 0.0;
  for (int i = 0; i <= 500; ++i)
    worst = std::max(worst, std::abs(pump::bessel_j0(0.01 * i) - pump::bessel_j0_period_average(0.01 * i)));
  const double zero = pump::first_bessel_zero();
  StroboscopicSetup s;
  const auto r50 = stroboscopic_fidelity(s);
  s.omega = 100.0;
  const auto r100 = stroboscopic_fidelity(s);
  StroboscopicSetup frozen;
  frozen.phi_max = zero;
  const auto rf = stroboscopic_fidelity(frozen);
  const bool pass = worst < 1e-10 && zero >= 2.40 && zero <= 2.41 &&
                    r100.max_deficit <= 0.5 * r50.max_deficit && rf.max_doublon_change < 1e-2;
  return {pass, fmt("quadrature %.1e, zero %.10f, deficit w=50U %.2e -> w=100U %.2e, frozen dD %.2e "
                    "(bare %.2e)",
                    worst, zero, r50.max_deficit, r100.max_deficit, rf.max_doublon_change,
                    rf.static_doublon_change)};
}

Verdict pump_parameters() {
  const double p4 = pump::phase_amplitude({1.4e8, 1.23e-9, 0.4});
  const double p8 = pump::phase_amplitude({1.4e8, 1.23e-9, 0.8});
  const double s4 = 1.0 - pump::bessel_j0(p4), s8 = 1.0 - pump::bessel_j0(p8);
  const bool pass = std::abs(p4 - 0.43) <= 0.01 && std::abs(p8 - 0.22) <= 0.01 && s4 > 0.04 &&
                    s8 >= 0.008 && s8 <= 0.014;
  return {pass, fmt("phi_max %.4f / %.4f, suppression %.2f%% / %.2f%%", p4, p8, 100 * s4, 100 * s8)};
}

Verdict quench() {
  const auto phis = log_grid(0.05, 0.2, 10);
  const auto r = quench_probability(LatticeGraph::chain(4), Statistics::fermion, 0.25, 1.0, phis);
  return {std::abs(r.fit_phi.exponent - 4.0) <= 0.1,
          fmt("slope %.4f vs phi_max, %.4f vs intensity (4-site chain, J0/U=0.25)",
              r.fit_phi.exponent, r.fit_intensity.exponent)};
}

Verdict resonance() {
  const int threads = default_threads();
  ResonanceSetup k4;
  const ResonanceProblem tetra(k4);
  const auto grid = default_omega_grid(tetra, 60);
  const double step = grid[1] - grid[0];
  const auto scan = resonance_scan(tetra, grid, threads);
  const double de1 = tetra.excitation_energy(1), de2 = tetra.excitation_energy(2);
  bool peak1 = false;
  for (const auto& p : scan.peaks[1]) peak1 = peak1 || std::abs(p.omega - de1) <= 2 * step + 1e-12;
  const double on2 = tetra.response(de2)[2];
  const double ratio_k4 = on2 / scan.baselines[2];

  ResonanceSetup sq_setup;
  sq_setup.graph = LatticeGraph::square();
  const ResonanceProblem square(sq_setup);
  const auto sq_grid = default_omega_grid(square, 60);
  const auto sq_scan = resonance_scan(square, sq_grid, threads);
  const double ratio_sq = square.response(square.excitation_energy(2))[2] / sq_scan.baselines[2];

  const bool pass = peak1 && ratio_k4 >= 10.0 && ratio_sq < 2.0;
  return {pass, fmt("K4: dE1 %.4f peak found %d (step %.3f), p2(dE2)/baseline %.1f; square: "
                    "p2(dE2)/baseline %.2f",
                    de1, int(peak1), step, ratio_k4, ratio_sq)};
}

Verdict properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };

  // Canonical algebra of same-spin bilinears and commuting opposite spins.
  {
    const FockBasis b(4, 2, 1, Statistics::fermion);
    auto e = [&](int i, int j, Spin s) -> Eigen::MatrixXd {
      return i == j ? Eigen::MatrixXd(number_matrix<double>(b, i, s))
                    : Eigen::MatrixXd(hop_matrix<double>(b, i, j, s));
    };
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            const Eigen::MatrixXd a = e(i, j, Spin::up), c = e(k, l, Spin::up), d = e(k, l, Spin::down);
            Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(b.dim(), b.dim());
            if (j == k) expect += e(i, l, Spin::up);
            if (i == l) expect -= e(k, j, Spin::up);
            worst = std::max({worst, (a * c - c * a - expect).cwiseAbs().maxCoeff(),
                              (a * d - d * a).cwiseAbs().maxCoeff()});
          }
    check(worst == 0.0, "anticommutation");
  }

  const auto chain = LatticeGraph::chain(4);
  const FockBasis b(4, 2, 2);
  DriveProtocol p;
  p.kind = DriveKind::peierls;
  p.phi_max = 0.8;
  p.omega = 1.0;
  const auto h = build_driven(chain, {0.25, 1.0}, b, p);
  double herm = 0.0;
  for (double t : {0.0, 0.4, 1.3, 2.2}) herm = std::max(herm, hermiticity_defect(h.matrix(t)));
  check(herm < 1e-14, "hermiticity");

  // Particle numbers measured along driven trajectories in every sector.
  {
    double worst = 0.0;
    for (int nu = 0; nu <= 4; ++nu)
      for (int nd = 0; nd <= 4; ++nd) {
        const FockBasis sector(4, nu, nd);
        const auto hs = build_driven(chain, {0.25, 1.0}, sector, p);
        Eigen::VectorXd n_up = Eigen::VectorXd::Zero(sector.dim()), n_down = n_up;
        for (Index i = 0; i < sector.dim(); ++i) {
          n_up(i) = std::popcount(sector.state(i).up);
          n_down(i) = std::popcount(sector.state(i).down);
        }
        EvolveOptions opt;
        opt.t_end = 2.0;
        opt.dt = 0.05;
        opt.record_energy = false;
        const auto traj = evolve(hs, Vector<cplx>::Ones(sector.dim()).normalized(), opt,
                                 {diagonal_observable("n_up", n_up), diagonal_observable("n_down", n_down)});
        for (std::size_t i = 0; i < traj.times.size(); ++i)
          worst = std::max({worst, std::abs(traj.values[0][i] - nu), std::abs(traj.values[1][i] - nd)});
      }
    check(worst < 1e-10, "particle-number");
  }

  const Vector<cplx> psi0 = basis_vector<cplx>(b, parse_product_state("ud,0,u,d", 4));
  EvolveOptions opt;
  opt.t_end = 20.0;
  opt.dt = recommended_dt(h, 1.0);
  const auto traj = evolve(h, psi0, opt, standard_observables(b));
  double drift = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    drift = std::max(drift, std::abs(traj.norms[i] - 1.0) / std::max(1.0, traj.times[i]));
  check(drift < 1e-8, "norm-drift");

  opt.dt /= 2;
  opt.record_stride = 2;
  const auto half = evolve(h, psi0, opt, standard_observables(b));
  double dt_change = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    dt_change = std::max(dt_change, std::abs(traj.values[0][i] - half.values[0][i]));
  check(dt_change < 1e-6, "dt-halving");

  const auto gauge = gauge_check({});
  check(gauge.max_doublon_discrepancy < 1e-6, "gauge");

  double trace_err = 0.0;
  {
    const FockBasis b5(5, 2, 3);
    Vector<cplx> psi(b5.dim());
    for (Index i = 0; i < b5.dim(); ++i) psi(i) = cplx(std::sin(1.0 + i), std::cos(0.3 * i * i));
    psi.normalize();
    for (int mu = 0; mu < 5; ++mu)
      for (int nu = 0; nu < 5; ++nu) {
        if (mu == nu) continue;
        const int pair[] = {mu, nu}, single[] = {mu};
        const auto rho2 = reduced_density(b5, psi, pair);
        const auto rho1 = reduced_density(b5, psi, single);
        Eigen::MatrixXcd traced = Eigen::MatrixXcd::Zero(4, 4);
        for (int x = 0; x < 4; ++x)
          for (int y = 0; y < 4; ++y)
            for (int k = 0; k < 4; ++k) traced(x, y) += rho2(4 * x + k, 4 * y + k);
        trace_err = std::max(trace_err, (traced - rho1).cwiseAbs().maxCoeff());
      }
  }
  check(trace_err < 1e-12, "partial-trace");

  std::string detail = fmt("norm drift %.1e/t, dt-halving %.1e, gauge %.1e, partial trace %.1e",
                           drift, dt_change, gauge.max_doublon_discrepancy, trace_err);
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> fn;
    double time_limit;  // seconds, 0 for none
  };
  const Criterion criteria[] = {
      {"paper matrices", paper_matrices, 10.0},
      {"oracle equivalence", oracle_equivalence, 120.0},
      {"scaling laws", scaling_laws, 0.0},
      {"square null result", square_null, 0.0},
      {"maximum location", maximum_location, 0.0},
      {"Bessel renormalization", bessel, 0.0},
      {"pump parameters", pump_parameters, 0.0},
      {"quench scaling", quench, 0.0},
      {"resonance scan", resonance, 600.0},
      {"property suites", properties, 300.0},
  };
  int failures = 0;
  int number = 0;
  for (const auto& [name, fn, limit] : criteria) {
    ++number;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit > 0 && secs > limit) {
      v.pass = false;
      v.detail += fmt("; runtime over the %.0f s budget", limit);
    }
    std::printf("criterion %d %s: %s (%.1f s) %s\n", number, v.pass ? "PASS" : "FAIL", name, secs,
                v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
