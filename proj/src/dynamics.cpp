#include "hubbard/dynamics.hpp"

#include "hubbard/parallel.hpp"
#include "hubbard/pumpcalc.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace hubbard {

namespace {

constexpr int kMaxKrylov = 40;

Vector<cplx> expmv_dense(const FrozenHamiltonian& a, const Vector<cplx>& v, double tau) {
  if (a.dim() > 400) throw CapacityError("expmv: dense exponential limited to dim <= 400");
  const Eigen::MatrixXcd m = Eigen::MatrixXcd(a.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -tau)).array().exp().matrix();
  return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * v));
}

Vector<cplx> expmv_lanczos(const FrozenHamiltonian& a, const Vector<cplx>& v, double tau,
                           double tolerance) {
  const double beta0 = v.norm();
  if (beta0 == 0.0) return v;
  const Index dim = v.size();
  const int max_m = static_cast<int>(std::min<Index>(kMaxKrylov, dim));

  std::vector<Vector<cplx>> q{v / beta0};
  std::vector<double> alpha, beta;
  Vector<cplx> w(dim);
  Eigen::VectorXcd y;
  bool converged = false;
  for (int j = 0; j < max_m; ++j) {
    a.apply(q[static_cast<std::size_t>(j)], w);
    alpha.push_back(q[static_cast<std::size_t>(j)].dot(w).real());
    w -= alpha.back() * q[static_cast<std::size_t>(j)];
    if (j > 0) w -= beta.back() * q[static_cast<std::size_t>(j - 1)];
    for (const auto& b : q) w -= b.dot(w) * b;
    const double b_next = w.norm();

    const int m = j + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd();
    es.computeFromTridiagonal(diag, sub);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<cplx>() * cplx(0.0, -tau)).array().exp().matrix();
    y = es.eigenvectors().cast<cplx>() *
        (phases.asDiagonal() * es.eigenvectors().row(0).transpose().cast<cplx>());

    const double scale = std::max(1.0, std::abs(diag.maxCoeff()));
    if (b_next < 1e-13 * scale || b_next * std::abs(y(m - 1)) < tolerance || m == dim) {
      converged = true;
      break;
    }
    beta.push_back(b_next);
    q.push_back(w / b_next);
  }
  if (!converged) {
    const Vector<cplx> half = expmv_lanczos(a, v, 0.5 * tau, tolerance);
    return expmv_lanczos(a, half, 0.5 * tau, tolerance);
  }
  Vector<cplx> out = Vector<cplx>::Zero(dim);
  for (Index i = 0; i < y.size(); ++i) out += y(i) * q[static_cast<std::size_t>(i)];
  return beta0 * out;
}

}  // namespace

Vector<cplx> expmv(const FrozenHamiltonian& a, const Vector<cplx>& v, double tau, ExpMethod method,
                   double tolerance) {
  if (method == ExpMethod::dense) return expmv_dense(a, v, tau);
  return expmv_lanczos(a, v, tau, tolerance);
}

Vector<cplx> cf4_step(const TimeDependentHamiltonian& h, const Vector<cplx>& psi, double t,
                      double dt, ExpMethod method) {
  static const double s3 = std::sqrt(3.0);
  static const double a1 = (3.0 - 2.0 * s3) / 12.0, a2 = (3.0 + 2.0 * s3) / 12.0;
  static const double c1 = 0.5 - s3 / 6.0, c2 = 0.5 + s3 / 6.0;
  const auto f1 = h.coefficients(t + c1 * dt);
  const auto f2 = h.coefficients(t + c2 * dt);
  std::vector<cplx> first(f1.size()), second(f1.size());
  for (std::size_t k = 0; k < f1.size(); ++k) {
    first[k] = a2 * f1[k] + a1 * f2[k];
    second[k] = a1 * f1[k] + a2 * f2[k];
  }
  const FrozenHamiltonian b1(h, a1 + a2, std::move(first));
  const FrozenHamiltonian b2(h, a1 + a2, std::move(second));
  return expmv(b2, expmv(b1, psi, dt, method), dt, method);
}

Observable diagonal_observable(std::string name, Eigen::VectorXd diagonal) {
  return {std::move(name), [d = std::move(diagonal)](const Vector<cplx>& psi) {
            return psi.cwiseAbs2().dot(d);
          }};
}

Observable population_observable(std::string name, Eigen::MatrixXcd block) {
  return {std::move(name), [b = std::move(block)](const Vector<cplx>& psi) {
            return (b.adjoint() * psi).squaredNorm();
          }};
}

std::vector<Observable> standard_observables(const FockBasis& basis,
                                             const SymmetricSubspace* subspace) {
  std::vector<Observable> obs;
  const Eigen::VectorXd d = doublon_counts(basis);
  obs.push_back(diagonal_observable("n_doublon", d));
  if (subspace) {
    if (!subspace->basis.same_sector(basis))
      throw std::invalid_argument("standard_observables: subspace sector mismatch");
    for (Index k = 0; k < subspace->dim(); ++k)
      obs.push_back(population_observable("p_" + std::to_string(k),
                                          subspace->vectors.col(k).cast<cplx>()));
  } else {
    const int kmax = std::min(basis.n_up(), basis.n_down());
    for (int k = 0; k <= kmax; ++k)
      obs.push_back(diagonal_observable("p_" + std::to_string(k),
                                        (d.array() == k).cast<double>().matrix()));
  }
  return obs;
}

const std::vector<double>& Trajectory::column(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw std::out_of_range("Trajectory: no observable '" + std::string(name) + "'");
}

Trajectory evolve(const TimeDependentHamiltonian& h, const Vector<cplx>& psi0,
                  const EvolveOptions& options, const std::vector<Observable>& observables) {
  if (psi0.size() != h.dim()) throw std::invalid_argument("evolve: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("evolve: psi0 not normalized");
  if (!(options.dt > 0) || !(options.t_end >= 0))
    throw std::invalid_argument("evolve: need dt > 0 and t_end >= 0");

  const auto steps = std::max<long>(1, static_cast<long>(std::ceil(options.t_end / options.dt - 1e-9)));
  const double dt = options.t_end / static_cast<double>(steps);
  const int stride = std::max(1, options.record_stride);

  Trajectory traj;
  for (const auto& o : observables) traj.names.push_back(o.name);
  traj.values.resize(observables.size());

  auto record = [&](double t, const Vector<cplx>& psi) {
    traj.times.push_back(t);
    traj.norms.push_back(psi.norm());
    if (options.record_energy) traj.energies.push_back(h.energy(t, psi));
    for (std::size_t k = 0; k < observables.size(); ++k)
      traj.values[k].push_back(observables[k].measure(psi));
    if (options.keep_states) traj.states.push_back(psi);
  };

  Vector<cplx> psi = psi0;
  record(0.0, psi);
  for (long n = 1; n <= steps; ++n) {
    const double t_prev = dt * static_cast<double>(n - 1);
    const double t = n == steps ? options.t_end : dt * static_cast<double>(n);
    psi = cf4_step(h, psi, t_prev, dt, options.method);
    const double drift = std::abs(psi.norm() - 1.0);
    if (!(drift <= options.max_norm_drift_per_time * std::max(1.0, t) + 1e-14))
      throw NumericalError("evolve: norm drift " + std::to_string(drift) + " at t=" +
                           std::to_string(t) + "; reduce dt");
    if (options.on_step) options.on_step(t, psi);
    if (n % stride == 0 || n == steps) record(t, psi);
  }
  traj.final_state = psi;
  return traj;
}

double recommended_dt(const TimeDependentHamiltonian& h, double omega, double u) {
  return 0.02 / std::max({omega, u, h.norm_bound(0.0), 1e-12});
}

Vector<cplx> propagate_static(const Spectrum<cplx>& spectrum, const Vector<cplx>& psi, double t) {
  const Eigen::VectorXcd phases =
      (spectrum.values.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
  return spectrum.vectors * (phases.asDiagonal() * (spectrum.vectors.adjoint() * psi));
}

// ---------------------------------------------------------------------------

namespace {

FockBasis half_filled(const LatticeGraph& g, Statistics stats) {
  if (g.n_sites % 2 != 0) throw std::invalid_argument("half filling needs an even site count");
  return FockBasis(g.n_sites, g.n_sites / 2, g.n_sites / 2, stats);
}

Eigen::VectorXd ground_state(const Operator<double>& h) {
  const auto spec = diagonalize(h);
  return spec.vectors.col(0);
}

}  // namespace

ResonanceProblem::ResonanceProblem(ResonanceSetup setup)
    : setup_(std::move(setup)), basis_(half_filled(setup_.graph, setup_.statistics)) {
  const double j = setup_.j_over_u;
  if (!(j > 0)) throw std::invalid_argument("resonance: J/U must be positive");
  if (!(setup_.amplitude >= 0) || setup_.amplitude > 0.2 * j * (1 + 1e-12))
    throw std::invalid_argument("resonance: drive amplitude must satisfy 0 <= A <= 0.2 J");
  if (setup_.periods < 4) throw std::invalid_argument("resonance: need at least 4 periods");
  max_pairs_ = setup_.graph.n_sites / 2;

  const Operator<double> h0 = build_hubbard<double>(setup_.graph, {j, 1.0}, basis_);
  const Operator<double> t = hopping_sum<double>(setup_.graph, basis_);
  const Operator<double> d = doublon_matrix<double>(basis_);
  hamiltonian_ = h0.cast<cplx>();
  hopping_ = t.cast<cplx>();

  const auto spec = diagonalize(h0);
  const Eigen::VectorXd dc = doublon_counts(basis_);
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(max_pairs_ + 1));
  for (Index k = 0; k < spec.values.size(); ++k) {
    const double dk = spec.vectors.col(k).cwiseAbs2().dot(dc);
    const int label = std::clamp(static_cast<int>(std::lround(dk)), 0, max_pairs_);
    members[static_cast<std::size_t>(label)].push_back(k);
  }
  for (const auto& m : members) {
    Eigen::MatrixXcd block(basis_.dim(), static_cast<Index>(m.size()));
    for (std::size_t c = 0; c < m.size(); ++c)
      block.col(static_cast<Index>(c)) = spec.vectors.col(m[c]).cast<cplx>();
    manifolds_.push_back(std::move(block));
  }
  const Eigen::VectorXd g = spec.vectors.col(0);
  ground_ = g.cast<cplx>();

  // Reference excitation energies from the invariant subspace reachable from the
  // ground state; per k the member most strongly coupled to the ground state.
  const Operator<double> ops[] = {t, d};
  const Eigen::MatrixXd q = krylov_closure(g, ops);
  const Eigen::MatrixXd hr = q.transpose() * (h0 * q);
  const auto rs = diagonalize(Eigen::MatrixXd(0.5 * (hr + hr.transpose())));
  const Eigen::MatrixXd full = q * rs.vectors;
  const Eigen::VectorXd tg = t * full.col(0);
  excitation_.assign(static_cast<std::size_t>(max_pairs_ + 1),
                     std::numeric_limits<double>::quiet_NaN());
  std::vector<double> coupling(static_cast<std::size_t>(max_pairs_ + 1), -1.0);
  excitation_[0] = 0.0;
  for (Index k = 1; k < rs.values.size(); ++k) {
    const double dk = full.col(k).cwiseAbs2().dot(dc);
    const int label = std::clamp(static_cast<int>(std::lround(dk)), 0, max_pairs_);
    const double c = std::abs(full.col(k).dot(tg));
    if (label > 0 && c > coupling[static_cast<std::size_t>(label)] + 1e-12) {
      coupling[static_cast<std::size_t>(label)] = c;
      excitation_[static_cast<std::size_t>(label)] = rs.values(k) - rs.values(0);
    }
  }
}

std::vector<double> ResonanceProblem::response(double omega) const {
  if (!(omega > 0)) throw std::invalid_argument("resonance: omega must be positive");
  DriveTerm term;
  term.op = hopping_;
  const double amp = setup_.amplitude;
  term.coefficient = [=](double t) { return cplx(amp * std::sin(omega * t)); };
  const TimeDependentHamiltonian h(hamiltonian_, {term});

  EvolveOptions opt;
  opt.t_end = setup_.periods * 2.0 * std::numbers::pi / omega;
  opt.dt = setup_.dt_scale / std::max({omega, 1.0, h.norm_bound(0.0)});
  opt.record_energy = false;
  opt.record_stride = std::numeric_limits<int>::max();

  const double t_avg = 0.75 * opt.t_end;
  std::vector<double> sums(manifolds_.size(), 0.0);
  long samples = 0;
  opt.on_step = [&](double t, const Vector<cplx>& psi) {
    if (t < t_avg) return;
    for (std::size_t k = 0; k < manifolds_.size(); ++k)
      sums[k] += (manifolds_[k].adjoint() * psi).squaredNorm();
    ++samples;
  };
  evolve(h, ground_, opt);
  for (double& s : sums) s /= static_cast<double>(std::max(1L, samples));
  return sums;
}

std::vector<Peak> find_peaks(std::span<const double> omegas, std::span<const double> values,
                             double factor) {
  if (omegas.size() != values.size()) throw std::invalid_argument("find_peaks: length mismatch");
  const std::size_t n = values.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(n / 2), sorted.end());
  const double baseline = sorted[n / 2];

  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || values[i] > values[i - 1];
    const bool right_ok = i + 1 == n || values[i] >= values[i + 1];
    if (!left_ok || !right_ok || !(values[i] > factor * baseline)) continue;
    const double half = 0.5 * values[i];
    auto crossing = [&](std::size_t a, std::size_t b) {
      const double f = (half - values[a]) / (values[b] - values[a]);
      return omegas[a] + f * (omegas[b] - omegas[a]);
    };
    double lo = omegas.front(), hi = omegas.back();
    for (std::size_t k = i; k > 0; --k)
      if (values[k - 1] < half) {
        lo = crossing(k - 1, k);
        break;
      }
    for (std::size_t k = i; k + 1 < n; ++k)
      if (values[k + 1] < half) {
        hi = crossing(k, k + 1);
        break;
      }
    peaks.push_back({omegas[i], values[i], hi - lo});
  }
  return peaks;
}

ResonanceScanResult resonance_scan(const ResonanceProblem& problem, std::span<const double> omegas,
                                   int threads) {
  const std::size_t kcount = static_cast<std::size_t>(problem.max_pairs() + 1);
  std::vector<std::vector<double>> per_omega(omegas.size());
  parallel_for(omegas.size(), threads,
               [&](std::size_t i) { per_omega[i] = problem.response(omegas[i]); });

  ResonanceScanResult r;
  r.omegas.assign(omegas.begin(), omegas.end());
  r.responses.assign(kcount, std::vector<double>(omegas.size()));
  for (std::size_t i = 0; i < omegas.size(); ++i)
    for (std::size_t k = 0; k < kcount; ++k) r.responses[k][i] = per_omega[i][k];
  for (std::size_t k = 0; k < kcount; ++k) {
    r.peaks.push_back(find_peaks(r.omegas, r.responses[k]));
    std::vector<double> sorted = r.responses[k];
    std::sort(sorted.begin(), sorted.end());
    r.baselines.push_back(sorted.empty() ? 0.0 : sorted[sorted.size() / 2]);
    r.excitation_energies.push_back(problem.excitation_energy(static_cast<int>(k)));
  }
  return r;
}

std::vector<double> default_omega_grid(const ResonanceProblem& problem, int points) {
  double top = std::numeric_limits<double>::quiet_NaN();
  for (int k = problem.max_pairs(); k >= 1 && std::isnan(top); --k) top = problem.excitation_energy(k);
  const double lo = 0.5 * problem.excitation_energy(1);
  return linear_grid(lo, 1.2 * top, points);
}

// ---------------------------------------------------------------------------

double quench_excitation(const LatticeGraph& graph, Statistics stats, double j0, double u,
                         double jbar) {
  const FockBasis basis = half_filled(graph, stats);
  const Eigen::VectorXd g0 = ground_state(build_hubbard<double>(graph, {j0, u}, basis));
  const Eigen::VectorXd g1 = ground_state(build_hubbard<double>(graph, {jbar, u}, basis));
  return (g0 - g1.dot(g0) * g1).squaredNorm();
}

QuenchResult quench_probability(const LatticeGraph& graph, Statistics stats, double j0, double u,
                                std::span<const double> phis) {
  const FockBasis basis = half_filled(graph, stats);
  const Eigen::VectorXd g0 = ground_state(build_hubbard<double>(graph, {j0, u}, basis));
  QuenchResult r;
  std::vector<double> fx, fy, fx2;
  for (double phi : phis) {
    if (phi < 0) throw std::invalid_argument("quench: phi_max must be >= 0");
    r.outside_window = r.outside_window || phi > 0.3;
    const double jbar = j0 * (1.0 - 0.25 * phi * phi);
    const Eigen::VectorXd g1 = ground_state(build_hubbard<double>(graph, {jbar, u}, basis));
    const double p = phi == 0.0 ? 0.0 : (g0 - g1.dot(g0) * g1).squaredNorm();
    r.phis.push_back(phi);
    r.probabilities.push_back(p);
    if (phi > 0) {
      fx.push_back(phi);
      fx2.push_back(phi * phi);
      fy.push_back(p);
    }
  }
  if (fx.size() >= 6) {
    r.fit_phi = scaling_fit(fx, fy, 0.0);
    r.fit_intensity = scaling_fit(fx2, fy, 0.0);
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

FockState neel_state(int n) {
  std::vector<LocalState> s;
  for (int i = 0; i < n; ++i) s.push_back(i % 2 ? LocalState::down : LocalState::up);
  return product_state(s);
}

}  // namespace

StroboscopicResult stroboscopic_fidelity(const StroboscopicSetup& setup) {
  if (setup.omega < 20.0 * std::max(setup.u, std::abs(setup.j0)))
    throw std::invalid_argument("stroboscopic: need omega >= 20 max(U, J0)");
  const LatticeGraph graph = LatticeGraph::chain(setup.chain_length);
  const FockBasis basis = half_filled(graph, setup.statistics);
  const Vector<cplx> psi0 =
      basis_vector<cplx>(basis, setup.initial.value_or(neel_state(setup.chain_length)));
  const Eigen::VectorXd dc = doublon_counts(basis);

  DriveProtocol p;
  p.kind = DriveKind::peierls;
  p.omega = setup.omega;
  p.phi_max = setup.phi_max;
  const auto h = build_driven(graph, {setup.j0, setup.u}, basis, p);

  StroboscopicResult r;
  r.jbar = pump::effective_hopping(setup.j0, setup.phi_max);
  const auto effective = diagonalize(build_hubbard<cplx>(graph, {r.jbar, setup.u}, basis));
  const auto bare = diagonalize(build_hubbard<cplx>(graph, {setup.j0, setup.u}, basis));

  const double period = 2.0 * std::numbers::pi / setup.omega;
  r.periods = std::max(1, static_cast<int>(std::lround(setup.t_total / period)));
  const double d0 = psi0.cwiseAbs2().dot(dc);

  EvolveOptions opt;
  opt.t_end = r.periods * period;
  opt.dt = period / setup.steps_per_period;
  opt.record_energy = false;
  opt.record_stride = std::numeric_limits<int>::max();
  long step = 0;
  opt.on_step = [&](double t, const Vector<cplx>& psi) {
    ++step;
    r.max_doublon_change = std::max(r.max_doublon_change, std::abs(psi.cwiseAbs2().dot(dc) - d0));
    if (step % setup.steps_per_period != 0) return;
    const Vector<cplx> ref = propagate_static(effective, psi0, t);
    r.max_deficit = std::max(r.max_deficit, 1.0 - std::norm(ref.dot(psi)));
    const Vector<cplx> b = propagate_static(bare, psi0, t);
    r.static_doublon_change = std::max(r.static_doublon_change, std::abs(b.cwiseAbs2().dot(dc) - d0));
  };
  evolve(h, psi0, opt);
  return r;
}

GaugeCheckResult gauge_check(const GaugeCheckSetup& setup) {
  const LatticeGraph graph = LatticeGraph::chain(setup.chain_length);
  const FockBasis basis = half_filled(graph, setup.statistics);
  const HubbardParams params{setup.j0, setup.u};
  Vector<cplx> psi0;
  if (setup.initial) psi0 = basis_vector<cplx>(basis, *setup.initial);
  else psi0 = ground_state(build_hubbard<double>(graph, params, basis)).cast<cplx>();

  DriveProtocol p;
  p.omega = setup.omega;
  p.phi_max = setup.phi_max;
  p.kind = DriveKind::peierls;
  const auto peierls = build_driven(graph, params, basis, p);
  p.kind = DriveKind::potential;
  const auto potential = build_driven(graph, params, basis, p);

  EvolveOptions opt;
  const double period = 2.0 * std::numbers::pi / setup.omega;
  opt.t_end = setup.periods * period;
  opt.dt = period / setup.steps_per_period;
  const auto obs = std::vector<Observable>{diagonal_observable("n_doublon", doublon_counts(basis))};
  const Trajectory a = evolve(peierls, psi0, opt, obs);
  const Trajectory b = evolve(potential, psi0, opt, obs);

  GaugeCheckResult r;
  r.times = a.times;
  r.doublon_peierls = a.values[0];
  r.doublon_potential = b.values[0];
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    r.max_doublon_discrepancy =
        std::max(r.max_doublon_discrepancy, std::abs(a.values[0][i] - b.values[0][i]));
    r.max_energy_discrepancy = std::max(r.max_energy_discrepancy, std::abs(a.energies[i] - b.energies[i]));
  }
  return r;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd correlated_part(const Eigen::MatrixXcd& rho_pair, const Eigen::MatrixXcd& rho_a,
                                 const Eigen::MatrixXcd& rho_b) {
  if (rho_pair.rows() != rho_a.rows() * rho_b.rows())
    throw std::invalid_argument("correlated_part: dimension mismatch");
  return rho_pair - kron(rho_a, rho_b);
}

Eigen::MatrixXcd reduced_density(const FockBasis& basis, const Vector<cplx>& psi,
                                 std::span<const int> sites) {
  const int n = basis.n_sites();
  const int k = static_cast<int>(sites.size());
  if (k < 1 || k > 2) throw std::invalid_argument("reduced_density: one or two sites");
  for (int s : sites)
    if (s < 0 || s >= n) throw std::out_of_range("reduced_density: site out of range");
  if (k == 2 && sites[0] == sites[1]) throw std::invalid_argument("reduced_density: sites coincide");
  if (psi.size() != basis.dim()) throw std::invalid_argument("reduced_density: dimension mismatch");

  Mask sub = 0;
  for (int s : sites) sub |= Mask{1} << s;
  const Index local_dim = k == 1 ? 4 : 16;
  const bool fermionic = basis.statistics() == Statistics::fermion;

  // Rank of each mode after moving the subsystem modes to the front in site-major
  // order (s0 up, s0 down, s1 up, s1 down); the rest keeps the global order.
  auto new_rank = [&](int site, int spin) {
    for (int j = 0; j < k; ++j)
      if (sites[static_cast<std::size_t>(j)] == site) return 2 * j + spin;
    return 2 * k + spin * n + site;
  };

  std::map<std::pair<Mask, Mask>, Eigen::VectorXcd> by_environment;
  for (Index i = 0; i < basis.dim(); ++i) {
    if (psi(i) == cplx(0)) continue;
    const FockState& st = basis.state(i);
    Index a = 0;
    for (int s : sites) a = 4 * a + static_cast<Index>(st.local(s));
    int sign = 1;
    if (fermionic) {
      int ranks[2 * kMaxSites];
      int m = 0;
      for (int spin = 0; spin < 2; ++spin) {
        const Mask mask = spin == 0 ? st.up : st.down;
        for (int site = 0; site < n; ++site)
          if ((mask >> site) & 1U) ranks[m++] = new_rank(site, spin);
      }
      int inversions = 0;
      for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y) inversions += ranks[x] > ranks[y];
      sign = (inversions & 1) ? -1 : 1;
    }
    auto [it, inserted] =
        by_environment.try_emplace({st.up & ~sub, st.down & ~sub}, Eigen::VectorXcd::Zero(local_dim));
    it->second(a) += static_cast<double>(sign) * psi(i);
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(local_dim, local_dim);
  for (const auto& [env, amp] : by_environment) rho.noalias() += amp * amp.adjoint();
  return rho;
}

}  // namespace hubbard
