#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hubbard {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Mask = std::uint32_t;

template <class Scalar>
using Operator = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, Index>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kMaxSites = 16;

/// Requested sector or matrix is larger than the engine supports.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Group-averaged projection of a seed vanished (norm below the null tolerance).
class NullProjection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Spin { up, down };

/// Exchange statistics of the two species.
///
/// `fermion` applies Jordan-Wigner signs in the global mode order: all up modes by
/// ascending site, then all down modes by ascending site. `hardcore_boson` keeps the
/// same occupation constraints and drops every exchange sign.
enum class Statistics { fermion, hardcore_boson };

std::string_view to_string(Statistics s);
Statistics statistics_from_string(std::string_view name);

/// Local site configuration, ordered as the local basis {0, up, down, up-down}.
enum class LocalState : int { empty = 0, up = 1, down = 2, updown = 3 };

struct FockState {
  Mask up = 0;
  Mask down = 0;

  constexpr auto operator<=>(const FockState&) const = default;

  constexpr Mask mask(Spin s) const { return s == Spin::up ? up : down; }
  constexpr int doublons() const { return std::popcount(up & down); }
  constexpr LocalState local(int site) const {
    return static_cast<LocalState>(((up >> site) & 1U) | (((down >> site) & 1U) << 1));
  }
};

/// Builds a product state from per-site configurations, e.g. {updown, empty, up, down}.
FockState product_state(std::span<const LocalState> sites);

/// Parses a comma separated site list: "ud,0,u,d".
FockState parse_product_state(std::string_view text, int n_sites);
std::string format_product_state(const FockState& s, int n_sites);

/// Fixed (N_up, N_down) sector, ordered lexicographically on (up_mask, down_mask).
class FockBasis {
 public:
  FockBasis(int n_sites, int n_up, int n_down, Statistics stats = Statistics::fermion);

  int n_sites() const { return n_sites_; }
  int n_up() const { return n_up_; }
  int n_down() const { return n_down_; }
  Statistics statistics() const { return stats_; }
  Index dim() const { return static_cast<Index>(states_.size()); }

  const FockState& state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
  std::span<const FockState> states() const { return states_; }

  bool contains(const FockState& s) const;
  /// Ordinal of `s`; throws std::out_of_range if `s` is not in the sector.
  Index index_of(const FockState& s) const;

  bool same_sector(const FockBasis& other) const {
    return n_sites_ == other.n_sites_ && n_up_ == other.n_up_ && n_down_ == other.n_down_ &&
           stats_ == other.stats_;
  }

 private:
  Index rank(Mask m) const;

  int n_sites_;
  int n_up_;
  int n_down_;
  Statistics stats_;
  std::vector<FockState> states_;
  std::vector<std::vector<Index>> binom_;
  Index down_count_;
};

/// Exact binomial coefficient for the small arguments used here.
Index binomial(int n, int k);

/// One nonzero of a signed 0/1 matrix.
struct SignedEntry {
  Index row;
  Index col;
  int sign;
};

namespace detail {

std::vector<SignedEntry> hop_entries(const FockBasis& basis, int mu, int nu, Spin s);
std::vector<SignedEntry> permutation_entries(const FockBasis& basis, std::span<const int> pi);
void check_permutation(std::span<const int> pi, int n_sites);

template <class Scalar>
Operator<Scalar> to_sparse(Index dim, const std::vector<SignedEntry>& entries) {
  std::vector<Eigen::Triplet<Scalar, Index>> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) triplets.emplace_back(e.row, e.col, Scalar(e.sign));
  Operator<Scalar> m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace detail

/// Image of `s` under the site relabeling `pi` and the exchange sign that restores
/// canonical mode order (always +1 for hard-core bosons).
std::pair<FockState, int> permute_state(const FockState& s, std::span<const int> pi,
                                        Statistics stats);

/// c†_{mu,s} c_{nu,s}. Rejects mu == nu; use number_matrix for the diagonal.
template <class Scalar = cplx>
Operator<Scalar> hop_matrix(const FockBasis& basis, int mu, int nu, Spin s) {
  return detail::to_sparse<Scalar>(basis.dim(), detail::hop_entries(basis, mu, nu, s));
}

template <class Scalar = cplx>
Operator<Scalar> number_matrix(const FockBasis& basis, int mu, Spin s) {
  if (mu < 0 || mu >= basis.n_sites()) throw std::out_of_range("number_matrix: site out of range");
  std::vector<SignedEntry> e;
  for (Index i = 0; i < basis.dim(); ++i)
    if ((basis.state(i).mask(s) >> mu) & 1U) e.push_back({i, i, 1});
  return detail::to_sparse<Scalar>(basis.dim(), e);
}

/// Diagonal of the doublon count operator Σ_mu n_up n_down.
Eigen::VectorXd doublon_counts(const FockBasis& basis);

template <class Scalar = cplx>
Operator<Scalar> doublon_matrix(const FockBasis& basis) {
  const Eigen::VectorXd d = doublon_counts(basis);
  Operator<Scalar> m(basis.dim(), basis.dim());
  m.reserve(Eigen::VectorXi::Ones(basis.dim()));
  for (Index i = 0; i < basis.dim(); ++i)
    if (d(i) != 0.0) m.insert(i, i) = Scalar(d(i));
  m.makeCompressed();
  return m;
}

/// Unitary implementing the site relabeling mu -> pi[mu] on both species.
template <class Scalar = cplx>
Operator<Scalar> permutation_matrix(const FockBasis& basis, std::span<const int> pi) {
  return detail::to_sparse<Scalar>(basis.dim(), detail::permutation_entries(basis, pi));
}

/// P(pi) v without forming the matrix.
template <class Scalar>
Vector<Scalar> apply_permutation(const FockBasis& basis, std::span<const int> pi,
                                 const Vector<Scalar>& v) {
  detail::check_permutation(pi, basis.n_sites());
  Vector<Scalar> out = Vector<Scalar>::Zero(basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) {
    if (v(i) == Scalar(0)) continue;
    auto [image, sign] = permute_state(basis.state(i), pi, basis.statistics());
    out(basis.index_of(image)) += Scalar(sign) * v(i);
  }
  return out;
}

inline constexpr double kNullProjectionTolerance = 1e-10;

/// Unnormalized group average (1/N!) Σ_pi P(pi) seed over the full symmetric group.
template <class Scalar>
Vector<Scalar> symmetric_projection(const FockBasis& basis, const Vector<Scalar>& seed) {
  const int n = basis.n_sites();
  std::vector<int> pi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pi[static_cast<std::size_t>(i)] = i;

  std::vector<Index> support;
  for (Index i = 0; i < seed.size(); ++i)
    if (seed(i) != Scalar(0)) support.push_back(i);

  Vector<Scalar> acc = Vector<Scalar>::Zero(basis.dim());
  double group_order = 0.0;
  do {
    for (Index i : support) {
      auto [image, sign] = permute_state(basis.state(i), pi, basis.statistics());
      acc(basis.index_of(image)) += Scalar(sign) * seed(i);
    }
    group_order += 1.0;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return acc / group_order;
}

/// Normalized fully symmetric component of `seed`; throws NullProjection when the
/// projection norm falls below kNullProjectionTolerance.
template <class Scalar>
Vector<Scalar> symmetrize(const FockBasis& basis, const Vector<Scalar>& seed) {
  if (seed.size() != basis.dim()) throw std::invalid_argument("symmetrize: dimension mismatch");
  Vector<Scalar> p = symmetric_projection(basis, seed);
  const double norm = p.norm();
  if (norm < kNullProjectionTolerance)
    throw NullProjection("symmetrize: seed has no fully symmetric component");
  return p / norm;
}

/// Basis vector e_i for a Fock state.
template <class Scalar = cplx>
Vector<Scalar> basis_vector(const FockBasis& basis, const FockState& s) {
  Vector<Scalar> v = Vector<Scalar>::Zero(basis.dim());
  v(basis.index_of(s)) = Scalar(1);
  return v;
}

/// max|A - A†| relative to max(1, max|A|).
template <class Scalar>
double hermiticity_defect(const Operator<Scalar>& a) {
  const Operator<Scalar> diff = a - Operator<Scalar>(a.adjoint());
  double scale = 1.0;
  for (Index k = 0; k < a.outerSize(); ++k)
    for (typename Operator<Scalar>::InnerIterator it(a, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (typename Operator<Scalar>::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst / scale;
}

}  // namespace hubbard
