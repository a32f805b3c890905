#include "doctest.h"

#include "hubbard/fock.hpp"
#include "hubbard/model.hpp"

#include <Eigen/Dense>

#include <numeric>

using namespace hubbard;

namespace {

// Jordan-Wigner construction on the full 2^(2L) Fock space from 2x2 blocks.
// Mode m = spin * L + site; mode 0 is the most significant tensor factor.
Eigen::MatrixXd kron2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd annihilator(int mode, int n_modes, bool signs) {
  Eigen::MatrixXd a(2, 2), z(2, 2), id = Eigen::MatrixXd::Identity(2, 2);
  a << 0, 1, 0, 0;
  z << 1, 0, 0, -1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
  for (int m = 0; m < n_modes; ++m) out = kron2(out, m < mode ? (signs ? z : id) : m == mode ? a : id);
  return out;
}

Index full_index(const FockState& s, int n_sites) {
  const int n_modes = 2 * n_sites;
  Index idx = 0;
  for (int m = 0; m < n_modes; ++m) {
    const Mask mask = m < n_sites ? s.up : s.down;
    const int site = m % n_sites;
    if ((mask >> site) & 1U) idx |= Index{1} << (n_modes - 1 - m);
  }
  return idx;
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& full, const FockBasis& b) {
  Eigen::MatrixXd out(b.dim(), b.dim());
  for (Index i = 0; i < b.dim(); ++i)
    for (Index j = 0; j < b.dim(); ++j)
      out(i, j) = full(full_index(b.state(i), b.n_sites()), full_index(b.state(j), b.n_sites()));
  return out;
}

std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[static_cast<std::size_t>(b[i])];
  return c;
}

}  // namespace

TEST_CASE("sector dimensions") {
  CHECK(FockBasis(4, 2, 2).dim() == 36);
  CHECK(FockBasis(6, 3, 3).dim() == 400);
  CHECK(FockBasis(8, 4, 4).dim() == 4900);
  CHECK(FockBasis(5, 0, 0).dim() == 1);
  CHECK(FockBasis(16, 1, 0).dim() == 16);
  CHECK(binomial(16, 8) == 12870);
  CHECK_THROWS_AS(FockBasis(17, 1, 1), CapacityError);
  CHECK_THROWS_AS(FockBasis(4, 5, 0), CapacityError);
  CHECK_THROWS_AS(FockBasis(4, -1, 0), CapacityError);
}

TEST_CASE("basis ordering and index round trip") {
  const FockBasis b(6, 3, 2);
  for (Index i = 0; i < b.dim(); ++i) {
    CHECK(b.index_of(b.state(i)) == i);
    CHECK(std::popcount(b.state(i).up) == 3);
    CHECK(std::popcount(b.state(i).down) == 2);
    if (i > 0) CHECK(b.state(i - 1) < b.state(i));
  }
  CHECK_FALSE(b.contains(FockState{0b111, 0b1}));
  CHECK_THROWS_AS(b.index_of(FockState{0b111, 0b1}), std::out_of_range);
}

TEST_CASE("product state text round trip") {
  const FockState s = parse_product_state("ud,0,u,d", 4);
  CHECK(s.up == 0b0101);
  CHECK(s.down == 0b1001);
  CHECK(s.doublons() == 1);
  CHECK(s.local(0) == LocalState::updown);
  CHECK(s.local(1) == LocalState::empty);
  CHECK(format_product_state(s, 4) == "ud,0,u,d");
  CHECK_THROWS(parse_product_state("ud,0,u", 4));
  CHECK_THROWS(parse_product_state("ud,x,u,d", 4));
}

TEST_CASE("hopping matches the Jordan-Wigner Kronecker construction") {
  const int n = 3;
  for (Statistics stats : {Statistics::fermion, Statistics::hardcore_boson}) {
    const bool signs = stats == Statistics::fermion;
    std::vector<Eigen::MatrixXd> c;
    for (int m = 0; m < 2 * n; ++m) c.push_back(annihilator(m, 2 * n, signs));
    for (auto [nu, nd] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
      const FockBasis b(n, nu, nd, stats);
      for (Spin s : {Spin::up, Spin::down})
        for (int mu = 0; mu < n; ++mu)
          for (int nu2 = 0; nu2 < n; ++nu2) {
            if (mu == nu2) continue;
            const int off = s == Spin::up ? 0 : n;
            const Eigen::MatrixXd oracle =
                restrict(c[static_cast<std::size_t>(off + mu)].transpose() * c[static_cast<std::size_t>(off + nu2)], b);
            const Eigen::MatrixXd got = Eigen::MatrixXd(hop_matrix<double>(b, mu, nu2, s));
            CHECK((oracle - got).cwiseAbs().maxCoeff() == 0.0);
          }
    }
  }
  CHECK_THROWS(hop_matrix<double>(FockBasis(3, 1, 1), 1, 1, Spin::up));
}

TEST_CASE("fermionic bilinears obey the canonical commutator algebra") {
  // [E_ij, E_kl] = δ_jk E_il - δ_il E_kj for E_ij = c†_i c_j of one spin; the
  // relation encodes the anticommutation relations of the underlying modes.
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
          const Eigen::MatrixXd a = e(i, j, Spin::up), c = e(k, l, Spin::up);
          Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(b.dim(), b.dim());
          if (j == k) expect += e(i, l, Spin::up);
          if (i == l) expect -= e(k, j, Spin::up);
          worst = std::max(worst, (a * c - c * a - expect).cwiseAbs().maxCoeff());
          const Eigen::MatrixXd d = e(k, l, Spin::down);
          worst = std::max(worst, (a * d - d * a).cwiseAbs().maxCoeff());
        }
  CHECK(worst == 0.0);
}

TEST_CASE("hop adjoint and Hermiticity") {
  const FockBasis b(5, 2, 3);
  for (int mu = 0; mu < 5; ++mu)
    for (int nu = 0; nu < 5; ++nu) {
      if (mu == nu) continue;
      const Operator<double> h = hop_matrix<double>(b, mu, nu, Spin::down);
      const Operator<double> ht = hop_matrix<double>(b, nu, mu, Spin::down);
      CHECK(Eigen::MatrixXd(h).transpose().isApprox(Eigen::MatrixXd(ht)));
    }
  const Operator<cplx> h = build_hubbard<cplx>(LatticeGraph::complete(5), {0.3, 1.0}, b);
  CHECK(hermiticity_defect(h) == 0.0);
}

TEST_CASE("site permutations form a representation that commutes with H on K4") {
  for (Statistics stats : {Statistics::fermion, Statistics::hardcore_boson}) {
    const FockBasis b(4, 2, 2, stats);
    const Eigen::MatrixXd h = Eigen::MatrixXd(build_hubbard<double>(LatticeGraph::complete(4), {0.2, 1.0}, b));
    std::vector<std::vector<int>> group;
    std::vector<int> pi{0, 1, 2, 3};
    do group.push_back(pi);
    while (std::next_permutation(pi.begin(), pi.end()));
    REQUIRE(group.size() == 24);

    std::vector<Eigen::MatrixXd> mats;
    for (const auto& g : group) mats.push_back(Eigen::MatrixXd(permutation_matrix<double>(b, g)));
    for (std::size_t a = 0; a < group.size(); ++a) {
      const auto& p = mats[a];
      CHECK((p.transpose() * p - Eigen::MatrixXd::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() == 0.0);
      CHECK((p * h - h * p).cwiseAbs().maxCoeff() < 1e-14);
      for (std::size_t c = 0; c < group.size(); ++c) {
        const auto prod = compose(group[a], group[c]);
        const std::size_t idx = static_cast<std::size_t>(
            std::find(group.begin(), group.end(), prod) - group.begin());
        CHECK((mats[a] * mats[c] - mats[idx]).cwiseAbs().maxCoeff() == 0.0);
      }
    }
    const Vector<double> v = Vector<double>::LinSpaced(b.dim(), 0.0, 1.0);
    CHECK((apply_permutation(b, group[7], v) - mats[7] * v).norm() == 0.0);
  }
}

TEST_CASE("group averaging") {
  const FockState ref = parse_product_state("u,d,u,d", 4);
  SUBCASE("fermionic zero-doublon seed has no symmetric component") {
    const FockBasis b(4, 2, 2, Statistics::fermion);
    CHECK_THROWS_AS(symmetrize(b, basis_vector<double>(b, ref)), NullProjection);
  }
  SUBCASE("hard-core boson seed symmetrizes to the uniform superposition") {
    const FockBasis b(4, 2, 2, Statistics::hardcore_boson);
    const Vector<double> v = symmetrize(b, basis_vector<double>(b, ref));
    CHECK(v.norm() == doctest::Approx(1.0));
    int support = 0;
    for (Index i = 0; i < b.dim(); ++i)
      if (std::abs(v(i)) > 1e-12) {
        ++support;
        CHECK(b.state(i).doublons() == 0);
        CHECK(v(i) == doctest::Approx(1.0 / std::sqrt(6.0)));
      }
    CHECK(support == 6);
  }
}

TEST_CASE("doublon counts") {
  const FockBasis b(4, 2, 2);
  const Eigen::VectorXd d = doublon_counts(b);
  CHECK(d.minCoeff() == 0.0);
  CHECK(d.maxCoeff() == 2.0);
  CHECK(d(b.index_of(parse_product_state("ud,ud,0,0", 4))) == 2.0);
}
