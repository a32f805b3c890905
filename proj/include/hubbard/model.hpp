#pragma once

#include "hubbard/fock.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hubbard {

enum class GraphKind { chain, square, complete };

/// Sites, undirected bonds and the coordinate of each site along the field axis
/// (units of the lattice spacing). Complete graphs carry no coordinates.
struct LatticeGraph {
  GraphKind kind = GraphKind::chain;
  int n_sites = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> positions;

  static LatticeGraph chain(int length);
  static LatticeGraph square();
  static LatticeGraph complete(int n);

  std::string name() const;
  bool has_positions() const { return !positions.empty(); }
  /// Number of neighbors of site 0; every supported graph is regular.
  int coordination() const;
};

GraphKind graph_kind_from_string(std::string_view name);

struct HubbardParams {
  double j0 = 0.0;
  double u = 1.0;

  /// Throws std::invalid_argument unless U > 0 and both values are finite.
  const HubbardParams& validated() const;
};

enum class DriveKind { none, peierls, delta_j, potential };
DriveKind drive_kind_from_string(std::string_view name);
std::string_view to_string(DriveKind k);

enum class EnvelopeKind { constant, sudden_on, gaussian };

struct Envelope {
  EnvelopeKind kind = EnvelopeKind::constant;
  double t0 = 0.0;      // switch-on time for sudden_on
  double center = 0.0;  // gaussian
  double fwhm = 1.0;    // gaussian

  double operator()(double t) const;
  std::string name() const;
};

Envelope envelope_from_string(std::string_view name, double t0, double center, double fwhm);

struct DriveProtocol {
  DriveKind kind = DriveKind::none;
  double omega = 1.0;
  double phi_max = 0.0;
  double dj_amp = 0.0;
  Envelope envelope;
};

/// Δφ(t) = phi_max sin(omega t) envelope(t). Throws unless kind == peierls.
double peierls_phase(const DriveProtocol& protocol, double t);

/// One time-dependent contribution f(t) M (+ conj(f(t)) M† when `add_adjoint`).
/// Without `add_adjoint`, M must be Hermitian and f real-valued.
struct DriveTerm {
  Operator<cplx> op;
  Operator<cplx> adjoint;
  std::function<cplx(double)> coefficient;
  bool add_adjoint = false;
};

class TimeDependentHamiltonian;

/// Fixed linear combination s·H_static + Σ_k c_k M_k (+ h.c. parts); used for
/// H(t) itself and for the weighted combinations of exponential integrators.
class FrozenHamiltonian {
 public:
  FrozenHamiltonian(const TimeDependentHamiltonian& h, double static_weight,
                    std::vector<cplx> coefficients);

  Index dim() const;
  Vector<cplx> apply(const Vector<cplx>& v) const;
  void apply(const Vector<cplx>& v, Vector<cplx>& out) const;
  Operator<cplx> matrix() const;

 private:
  const TimeDependentHamiltonian* h_;
  double static_weight_;
  std::vector<cplx> coeffs_;
};

class TimeDependentHamiltonian {
 public:
  explicit TimeDependentHamiltonian(Operator<cplx> static_part, std::vector<DriveTerm> drive = {});

  Index dim() const { return static_part_.rows(); }
  const Operator<cplx>& static_part() const { return static_part_; }
  const std::vector<DriveTerm>& drive_terms() const { return drive_; }

  /// Coefficients f_k(t) of every drive term.
  std::vector<cplx> coefficients(double t) const;
  FrozenHamiltonian at(double t) const;
  Operator<cplx> matrix(double t) const { return at(t).matrix(); }
  double energy(double t, const Vector<cplx>& psi) const;
  /// Upper bound on ‖H(t)‖ from row sums of |static| + |drive| envelopes at t.
  double norm_bound(double t) const;

 private:
  Operator<cplx> static_part_;
  std::vector<DriveTerm> drive_;
};

/// Unit hopping sum -Σ_{edges,s} (c†_mu c_nu + h.c.); the Hubbard hopping part at J = 1
/// and the perturbation H_ΔJ per unit ΔJ.
template <class Scalar = cplx>
Operator<Scalar> hopping_sum(const LatticeGraph& graph, const FockBasis& basis) {
  if (graph.n_sites != basis.n_sites())
    throw std::invalid_argument("hopping_sum: graph and basis site counts differ");
  Operator<Scalar> t(basis.dim(), basis.dim());
  for (auto [a, b] : graph.edges)
    for (Spin s : {Spin::up, Spin::down})
      t -= hop_matrix<Scalar>(basis, a, b, s) + hop_matrix<Scalar>(basis, b, a, s);
  t.prune(Scalar(0));
  return t;
}

/// Σ_mu x_mu (n_up + n_down) with x_mu the coordinate along the field axis.
template <class Scalar = cplx>
Operator<Scalar> dipole_matrix(const LatticeGraph& graph, const FockBasis& basis) {
  if (!graph.has_positions()) throw std::invalid_argument("dipole_matrix: graph has no positions");
  Operator<Scalar> m(basis.dim(), basis.dim());
  m.reserve(Eigen::VectorXi::Ones(basis.dim()));
  for (Index i = 0; i < basis.dim(); ++i) {
    const FockState& s = basis.state(i);
    double x = 0.0;
    for (int mu = 0; mu < graph.n_sites; ++mu)
      x += graph.positions[static_cast<std::size_t>(mu)] *
           static_cast<double>(((s.up >> mu) & 1U) + ((s.down >> mu) & 1U));
    if (x != 0.0) m.insert(i, i) = Scalar(x);
  }
  m.makeCompressed();
  return m;
}

/// -J0 Σ_{edges,s}(c†c + h.c.) + U Σ n_up n_down.
template <class Scalar = cplx>
Operator<Scalar> build_hubbard(const LatticeGraph& graph, const HubbardParams& params,
                               const FockBasis& basis) {
  params.validated();
  if (graph.n_sites != basis.n_sites())
    throw std::invalid_argument("build_hubbard: graph and basis site counts differ");
  Operator<Scalar> h = Scalar(params.j0) * hopping_sum<Scalar>(graph, basis) +
                       Scalar(params.u) * doublon_matrix<Scalar>(basis);
  h.prune(Scalar(0));
  return h;
}

TimeDependentHamiltonian build_driven(const LatticeGraph& graph, const HubbardParams& params,
                                      const FockBasis& basis, const DriveProtocol& protocol);

}  // namespace hubbard
