#pragma once

#include "hubbard/model.hpp"
#include "hubbard/spectra.hpp"
#include "hubbard/symmetry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hubbard {

/// Norm drift or non-convergence during time evolution.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExpMethod {
  krylov,  // Lanczos action of the exponential
  dense,   // full eigendecomposition, dim <= 400
};

/// exp(-i tau A) v.
Vector<cplx> expmv(const FrozenHamiltonian& a, const Vector<cplx>& v, double tau,
                   ExpMethod method = ExpMethod::krylov, double tolerance = 1e-14);

/// One step of the fourth-order commutator-free exponential integrator
/// (two exponentials built from H at the Gauss-Legendre nodes).
Vector<cplx> cf4_step(const TimeDependentHamiltonian& h, const Vector<cplx>& psi, double t,
                      double dt, ExpMethod method = ExpMethod::krylov);

struct Observable {
  std::string name;
  std::function<double(const Vector<cplx>&)> measure;
};

/// Σ_i d_i |ψ_i|² for a diagonal operator d.
Observable diagonal_observable(std::string name, Eigen::VectorXd diagonal);
/// ‖B† ψ‖² for a block B with orthonormal columns.
Observable population_observable(std::string name, Eigen::MatrixXcd block);

/// n_doublon plus p_k. p_k is |⟨ψ_k|ψ⟩|² when a symmetric subspace is given and the
/// weight on the k-doublon Fock states otherwise.
std::vector<Observable> standard_observables(const FockBasis& basis,
                                             const SymmetricSubspace* subspace = nullptr);

struct EvolveOptions {
  double t_end = 1.0;
  double dt = 0.01;
  ExpMethod method = ExpMethod::krylov;
  int record_stride = 1;
  bool record_energy = true;
  bool keep_states = false;
  double max_norm_drift_per_time = 1e-8;
  /// Called after every step with the new time and state.
  std::function<void(double, const Vector<cplx>&)> on_step;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> energies;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // values[observable][record]
  std::vector<Vector<cplx>> states;         // only with keep_states
  Vector<cplx> final_state;

  const std::vector<double>& column(std::string_view name) const;
};

/// Integrates i ∂_t ψ = H(t) ψ from t = 0. The step is shrunk so that t_end is hit
/// exactly. Throws NumericalError if |‖ψ‖ - 1| exceeds the drift bound.
Trajectory evolve(const TimeDependentHamiltonian& h, const Vector<cplx>& psi0,
                  const EvolveOptions& options, const std::vector<Observable>& observables = {});

/// 0.02 / max(omega, U, ‖H‖).
double recommended_dt(const TimeDependentHamiltonian& h, double omega, double u = 1.0);

/// exp(-i H t) ψ from a full eigendecomposition of a static H.
Vector<cplx> propagate_static(const Spectrum<cplx>& spectrum, const Vector<cplx>& psi, double t);

// ---------------------------------------------------------------------------
// Resonance scans

struct ResonanceSetup {
  LatticeGraph graph = LatticeGraph::complete(4);
  double j_over_u = 0.1;
  double amplitude = 0.02;  // ΔJ amplitude, A/J <= 0.2
  int periods = 40;
  Statistics statistics = Statistics::hardcore_boson;
  double dt_scale = 0.02;
};

/// Precomputed spectral data for the ΔJ(t) = A sin(ωt) resonance experiment at U = 1.
class ResonanceProblem {
 public:
  explicit ResonanceProblem(ResonanceSetup setup);

  const ResonanceSetup& setup() const { return setup_; }
  const FockBasis& basis() const { return basis_; }
  int max_pairs() const { return max_pairs_; }
  /// ΔE_k of the k-pair state reachable from the ground state (NaN if none).
  double excitation_energy(int k) const { return excitation_[static_cast<std::size_t>(k)]; }
  /// Per-k population of the k-pair eigenstate manifold, time-averaged over the last
  /// quarter of a constant-envelope pulse of `periods` drive periods.
  std::vector<double> response(double omega) const;

 private:
  ResonanceSetup setup_;
  FockBasis basis_;
  int max_pairs_ = 0;
  std::vector<double> excitation_;
  Operator<cplx> hamiltonian_;
  Operator<cplx> hopping_;
  std::vector<Eigen::MatrixXcd> manifolds_;
  Vector<cplx> ground_;
};

struct Peak {
  double omega = 0.0;
  double height = 0.0;
  double width = 0.0;  // full width at half height, linear interpolation
};

/// Local maxima higher than `factor` times the median of `values`.
std::vector<Peak> find_peaks(std::span<const double> omegas, std::span<const double> values,
                             double factor = 3.0);

struct ResonanceScanResult {
  std::vector<double> omegas;
  std::vector<std::vector<double>> responses;  // [k][i]
  std::vector<std::vector<Peak>> peaks;        // [k]
  std::vector<double> baselines;               // median per k
  std::vector<double> excitation_energies;     // ΔE_k
  bool null_scan(int k) const { return peaks[static_cast<std::size_t>(k)].empty(); }
};

ResonanceScanResult resonance_scan(const ResonanceProblem& problem,
                                   std::span<const double> omegas, int threads = 1);

/// Uniform grid over [0.5 ΔE_1, 1.2 ΔE_top].
std::vector<double> default_omega_grid(const ResonanceProblem& problem, int points);

// ---------------------------------------------------------------------------
// Sudden quench of the hopping J0 -> J̄ = J0 (1 - phi²/4)

struct QuenchResult {
  std::vector<double> phis;
  std::vector<double> probabilities;
  ScalingFit fit_phi;        // P against phi_max, slope 4
  ScalingFit fit_intensity;  // P against phi_max², slope 2
  bool outside_window = false;  // some phi_max > 0.3
};

/// 1 - |⟨ground(J̄)|ground(J0)⟩|², computed as the norm of the orthogonal complement.
double quench_excitation(const LatticeGraph& graph, Statistics stats, double j0, double u,
                         double jbar);

QuenchResult quench_probability(const LatticeGraph& graph, Statistics stats, double j0, double u,
                                std::span<const double> phis);

// ---------------------------------------------------------------------------
// High-frequency Peierls drive against static J̄ dynamics

struct StroboscopicSetup {
  int chain_length = 4;
  double j0 = 0.25;
  double u = 1.0;
  double phi_max = 1.0;
  double omega = 50.0;
  double t_total = 10.0;
  int steps_per_period = 200;
  std::optional<FockState> initial;  // default: Néel state u,d,u,d,...
  Statistics statistics = Statistics::fermion;
};

struct StroboscopicResult {
  double max_deficit = 0.0;  // max over periods of 1 - |⟨ψ_drive|ψ_J̄⟩|²
  double max_doublon_change = 0.0;  // driven run, max |⟨D⟩(t) - ⟨D⟩(0)|
  double static_doublon_change = 0.0;  // same with the bare J0 dynamics
  double jbar = 0.0;
  int periods = 0;
};

StroboscopicResult stroboscopic_fidelity(const StroboscopicSetup& setup);

// ---------------------------------------------------------------------------
// Peierls gauge against scalar-potential gauge on an open chain

struct GaugeCheckSetup {
  int chain_length = 4;
  double j0 = 0.25;
  double u = 1.0;
  double phi_max = 0.3;
  double omega = 1.0;
  int periods = 5;
  int steps_per_period = 400;
  std::optional<FockState> initial;  // default: ground state of the static chain
  Statistics statistics = Statistics::fermion;
};

struct GaugeCheckResult {
  double max_doublon_discrepancy = 0.0;
  double max_energy_discrepancy = 0.0;
  std::vector<double> times;
  std::vector<double> doublon_peierls;
  std::vector<double> doublon_potential;
};

GaugeCheckResult gauge_check(const GaugeCheckSetup& setup);

// ---------------------------------------------------------------------------
// Reduced density matrices in the local basis {0, up, down, up-down}

/// Partial trace onto one or two distinct sites; the first site is the major index.
Eigen::MatrixXcd reduced_density(const FockBasis& basis, const Vector<cplx>& psi,
                                 std::span<const int> sites);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// ρ_{μν} - ρ_μ ⊗ ρ_ν.
Eigen::MatrixXcd correlated_part(const Eigen::MatrixXcd& rho_pair, const Eigen::MatrixXcd& rho_a,
                                 const Eigen::MatrixXcd& rho_b);

/// Two-site index of the local pair (a, b).
constexpr Index pair_index(LocalState a, LocalState b) {
  return 4 * static_cast<Index>(a) + static_cast<Index>(b);
}

}  // namespace hubbard
