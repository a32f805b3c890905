#pragma once

#include "hubbard/fock.hpp"
#include "hubbard/model.hpp"

#include <optional>
#include <vector>

namespace hubbard {

/// Invariant subspace of a half-filled cluster spanned by real orthonormal vectors
/// ordered by doublon count. For K_N the counts are exactly 0, 1, ..., N/2.
struct SymmetricSubspace {
  FockBasis basis;
  LatticeGraph graph;
  Eigen::MatrixXd vectors;          // columns live in the full sector
  std::vector<int> doublon_counts;  // per column, non-decreasing
  Eigen::MatrixXd t_reduced;        // unit hopping sum, i.e. H at J = 1, U = 0
  Eigen::MatrixXd d_reduced;        // doublon operator
  bool from_krylov = false;

  Index dim() const { return vectors.cols(); }
  int max_pairs() const { return doublon_counts.empty() ? 0 : doublon_counts.back(); }
  /// Reduced Hubbard matrix J t_reduced + U d_reduced.
  Eigen::MatrixXd hubbard(double j, double u) const { return j * t_reduced + u * d_reduced; }
};

/// Reference state with k doublons: doublons on sites [0, k), holes on [k, 2k),
/// alternating up/down singles on the rest (half filling).
FockState reference_state(int n_sites, int k);

/// Fully permutation-invariant subspace of the half-filled K_N cluster (N even, N <= 8),
/// built by group averaging the reference states. Falls back to a Krylov closure of ψ0
/// when a projection is null; throws NullProjection when both constructions fail.
SymmetricSubspace build_symmetric_subspace(int n_sites,
                                           Statistics stats = Statistics::hardcore_boson);

/// Orthonormal basis of the smallest subspace containing `seed` that is closed under
/// every operator in `ops`. Stops with CapacityError past `max_dim` vectors.
Eigen::MatrixXd krylov_closure(const Eigen::VectorXd& seed, std::span<const Operator<double>> ops,
                               double tolerance = 1e-10, Index max_dim = 64);

/// Invariant subspace of the 4-site cycle containing the ground state: the Krylov
/// closure of the symmetrized zero-doublon state under the hopping sum and the
/// doublon operator, re-expressed in a doublon-count eigenbasis.
SymmetricSubspace square_subspace(Statistics stats = Statistics::hardcore_boson);

/// Reports whether the square closure exceeded 10 vectors.
inline bool oversized(const SymmetricSubspace& s) { return s.dim() > 10; }

/// ⟨ψ_j| op |ψ_k⟩.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reduce_operator(const SymmetricSubspace& s,
                                                                      const Operator<Scalar>& op) {
  if (op.rows() != s.basis.dim() || op.cols() != s.basis.dim())
    throw std::invalid_argument("reduce_operator: operator does not act on the subspace sector");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v = s.vectors.cast<Scalar>();
  return v.adjoint() * (op * v);
}

/// max_k ‖(1 - Π) op ψ_k‖ where Π projects onto the span.
double invariance_residual(const SymmetricSubspace& s, const Operator<double>& op);

}  // namespace hubbard
