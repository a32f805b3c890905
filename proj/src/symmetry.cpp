#include "hubbard/symmetry.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hubbard {

FockState reference_state(int n_sites, int k) {
  if (n_sites % 2 != 0 || 2 * k > n_sites || k < 0)
    throw std::invalid_argument("reference_state: need even N and 0 <= k <= N/2");
  std::vector<LocalState> sites(static_cast<std::size_t>(n_sites), LocalState::empty);
  for (int i = 0; i < k; ++i) sites[static_cast<std::size_t>(i)] = LocalState::updown;
  bool up = true;
  for (int i = 2 * k; i < n_sites; ++i, up = !up)
    sites[static_cast<std::size_t>(i)] = up ? LocalState::up : LocalState::down;
  return product_state(sites);
}

Eigen::MatrixXd krylov_closure(const Eigen::VectorXd& seed, std::span<const Operator<double>> ops,
                               double tolerance, Index max_dim) {
  const double n0 = seed.norm();
  if (n0 < tolerance) throw std::invalid_argument("krylov_closure: seed vector is null");
  std::vector<Eigen::VectorXd> q{seed / n0};
  for (std::size_t next = 0; next < q.size(); ++next) {
    for (const auto& op : ops) {
      Eigen::VectorXd w = op * q[next];
      // Two Gram-Schmidt passes keep the basis orthonormal to round-off.
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : q) w -= b.dot(w) * b;
      const double nw = w.norm();
      if (nw > tolerance) {
        if (static_cast<Index>(q.size()) >= max_dim)
          throw CapacityError("krylov_closure: closure exceeds " + std::to_string(max_dim) +
                              " vectors");
        q.push_back(w / nw);
      }
    }
  }
  Eigen::MatrixXd basis(seed.size(), static_cast<Index>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) basis.col(static_cast<Index>(i)) = q[i];
  return basis;
}

double invariance_residual(const SymmetricSubspace& s, const Operator<double>& op) {
  double worst = 0.0;
  for (Index k = 0; k < s.dim(); ++k) {
    Eigen::VectorXd w = op * s.vectors.col(k);
    w -= s.vectors * (s.vectors.transpose() * w);
    worst = std::max(worst, w.norm());
  }
  return worst;
}

namespace {

constexpr double kClosureTolerance = 1e-10;

// Rotates a closure basis into eigenvectors of the (diagonal) doublon operator and
// sorts by count.
void sort_by_doublons(SymmetricSubspace& s, const Operator<double>& doublon) {
  const Eigen::MatrixXd d = s.vectors.transpose() * (doublon * s.vectors);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  s.vectors = s.vectors * es.eigenvectors();
  s.doublon_counts.clear();
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double c = es.eigenvalues()(i);
    if (std::abs(c - std::round(c)) > 1e-8)
      throw std::runtime_error("closure basis is not a doublon-count eigenbasis");
    s.doublon_counts.push_back(static_cast<int>(std::lround(c)));
  }
}

void finish(SymmetricSubspace& s, const Operator<double>& hopping, const Operator<double>& doublon) {
  // Fix basis phases so consecutive hopping elements are non-positive; within
  // a degenerate count block keep the largest component positive instead.
  for (Index k = 0; k < s.dim(); ++k) {
    Index arg;
    s.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (s.vectors(arg, k) < 0) s.vectors.col(k) *= -1.0;
  }
  for (Index k = 0; k + 1 < s.dim(); ++k) {
    const double tk = s.vectors.col(k).dot(hopping * s.vectors.col(k + 1));
    if (s.doublon_counts[static_cast<std::size_t>(k + 1)] ==
            s.doublon_counts[static_cast<std::size_t>(k)] + 1 &&
        tk > 0)
      s.vectors.col(k + 1) *= -1.0;
  }
  s.t_reduced = s.vectors.transpose() * (hopping * s.vectors);
  s.t_reduced = 0.5 * (s.t_reduced + s.t_reduced.transpose()).eval();
  s.d_reduced = Eigen::MatrixXd::Zero(s.dim(), s.dim());
  for (Index k = 0; k < s.dim(); ++k)
    s.d_reduced(k, k) = s.doublon_counts[static_cast<std::size_t>(k)];

  const double residual =
      std::max(invariance_residual(s, hopping), invariance_residual(s, doublon));
  if (residual > kClosureTolerance)
    throw std::runtime_error("symmetric subspace is not invariant (residual " +
                             std::to_string(residual) + ")");
}

}  // namespace

SymmetricSubspace build_symmetric_subspace(int n_sites, Statistics stats) {
  if (n_sites % 2 != 0 || n_sites < 2 || n_sites > 8)
    throw std::invalid_argument("build_symmetric_subspace: N must be even and at most 8");
  const int half = n_sites / 2;
  SymmetricSubspace s{FockBasis(n_sites, half, half, stats), LatticeGraph::complete(n_sites), {},
                      {}, {}, {}, false};
  const Operator<double> hopping = hopping_sum<double>(s.graph, s.basis);
  const Operator<double> doublon = doublon_matrix<double>(s.basis);

  std::vector<Eigen::VectorXd> psi;
  bool null_projection = false;
  for (int k = 0; k <= half; ++k) {
    try {
      psi.push_back(symmetrize(s.basis, basis_vector<double>(s.basis, reference_state(n_sites, k))));
    } catch (const NullProjection&) {
      null_projection = true;
      break;
    }
  }

  if (!null_projection) {
    s.vectors.resize(s.basis.dim(), half + 1);
    for (int k = 0; k <= half; ++k) {
      s.vectors.col(k) = psi[static_cast<std::size_t>(k)];
      s.doublon_counts.push_back(k);
    }
  } else {
    if (psi.empty())
      throw NullProjection("build_symmetric_subspace: zero-doublon state has no symmetric "
                           "component under this exchange statistics; Krylov fallback needs it");
    const Operator<double> ops[] = {hopping, doublon};
    s.vectors = krylov_closure(psi.front(), ops, kClosureTolerance);
    s.from_krylov = true;
    sort_by_doublons(s, doublon);
    for (int k = 0; k < static_cast<int>(s.doublon_counts.size()); ++k)
      if (s.doublon_counts[static_cast<std::size_t>(k)] != k || s.dim() != half + 1)
        throw NullProjection("build_symmetric_subspace: Krylov fallback does not give one "
                             "vector per doublon count");
  }
  finish(s, hopping, doublon);
  return s;
}

SymmetricSubspace square_subspace(Statistics stats) {
  SymmetricSubspace s{FockBasis(4, 2, 2, stats), LatticeGraph::square(), {}, {}, {}, {}, true};
  const Operator<double> hopping = hopping_sum<double>(s.graph, s.basis);
  const Operator<double> doublon = doublon_matrix<double>(s.basis);
  const Eigen::VectorXd seed =
      symmetrize(s.basis, basis_vector<double>(s.basis, reference_state(4, 0)));
  const Operator<double> ops[] = {hopping, doublon};
  s.vectors = krylov_closure(seed, ops, kClosureTolerance);
  sort_by_doublons(s, doublon);
  finish(s, hopping, doublon);
  return s;
}

}  // namespace hubbard
