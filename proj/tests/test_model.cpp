#include "doctest.h"

#include "hubbard/model.hpp"
#include "hubbard/spectra.hpp"

#include <cmath>
#include <numbers>

using namespace hubbard;

TEST_CASE("graphs") {
  const auto k4 = LatticeGraph::complete(4);
  CHECK(k4.edges.size() == 6);
  CHECK(k4.coordination() == 3);
  CHECK_FALSE(k4.has_positions());
  CHECK(LatticeGraph::complete(8).coordination() == 7);
  const auto sq = LatticeGraph::square();
  CHECK(sq.edges.size() == 4);
  CHECK(sq.coordination() == 2);
  const auto ch = LatticeGraph::chain(5);
  CHECK(ch.edges.size() == 4);
  CHECK(ch.positions[4] == 4.0);
  CHECK(graph_kind_from_string("cycle") == GraphKind::square);
  CHECK_THROWS(graph_kind_from_string("torus"));
  CHECK_THROWS_AS(LatticeGraph::chain(17), CapacityError);
}

TEST_CASE("two-site ground energy has the closed form") {
  for (Statistics stats : {Statistics::fermion, Statistics::hardcore_boson})
    for (double j : {0.05, 0.3, 1.7}) {
      const double u = 1.3;
      const FockBasis b(2, 1, 1, stats);
      const auto spec = diagonalize(build_hubbard<double>(LatticeGraph::chain(2), {j, u}, b));
      CHECK(spec.values(0) == doctest::Approx((u - std::sqrt(u * u + 16 * j * j)) / 2).epsilon(1e-13));
    }
}

TEST_CASE("Hubbard parameters are validated") {
  const FockBasis b(2, 1, 1);
  CHECK_THROWS_AS(build_hubbard<double>(LatticeGraph::chain(2), {0.1, 0.0}, b), std::invalid_argument);
  CHECK_THROWS_AS(build_hubbard<double>(LatticeGraph::chain(2), {NAN, 1.0}, b), std::invalid_argument);
  CHECK_THROWS_AS(build_hubbard<double>(LatticeGraph::chain(3), {0.1, 1.0}, b), std::invalid_argument);
}

TEST_CASE("envelopes") {
  const Envelope g = envelope_from_string("gaussian", 0, 5.0, 2.0);
  CHECK(g(5.0) == 1.0);
  CHECK(g(6.0) == doctest::Approx(0.5));
  CHECK(g(4.0) == doctest::Approx(0.5));
  const Envelope s = envelope_from_string("sudden", 1.0, 0, 1);
  CHECK(s(0.999) == 0.0);
  CHECK(s(1.0) == 1.0);
  CHECK_THROWS(envelope_from_string("gaussian", 0, 0, 0));
  CHECK_THROWS(envelope_from_string("square", 0, 0, 1));
}

TEST_CASE("driven Hamiltonians stay Hermitian and reduce to the static one at zero phase") {
  const auto chain = LatticeGraph::chain(4);
  const FockBasis b(4, 2, 2);
  const HubbardParams params{0.25, 1.0};
  const Operator<cplx> h0 = build_hubbard<cplx>(chain, params, b);
  for (DriveKind kind : {DriveKind::peierls, DriveKind::delta_j, DriveKind::potential}) {
    DriveProtocol p;
    p.kind = kind;
    p.omega = 1.3;
    p.phi_max = 0.7;
    p.dj_amp = 0.05;
    const auto h = build_driven(chain, params, b, p);
    for (double t : {0.1, 0.77, 2.9}) CHECK(hermiticity_defect(h.matrix(t)) < 1e-15);
    if (kind != DriveKind::potential)
      CHECK(Eigen::MatrixXcd(h.matrix(0.0) - h0).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("Peierls phases on the chain") {
  const auto chain = LatticeGraph::chain(3);
  const FockBasis b(3, 1, 0);
  DriveProtocol p;
  p.kind = DriveKind::peierls;
  p.omega = 1.0;
  p.phi_max = 0.4;
  const auto h = build_driven(chain, {0.5, 1.0}, b, p);
  const double t = 0.6;
  const double dphi = peierls_phase(p, t);
  CHECK(dphi == doctest::Approx(0.4 * std::sin(0.6)));
  const Eigen::MatrixXcd m = h.matrix(t);
  // Single up particle: basis order is site 0, 1, 2; element <0|H|1> is the c†_0 c_1 coefficient.
  const cplx expected = -0.5 * std::exp(cplx(0.0, dphi));
  CHECK(std::abs(m(0, 1) - expected) < 1e-15);
  CHECK(std::abs(m(1, 0) - std::conj(expected)) < 1e-15);
  CHECK(std::abs(m(0, 2)) == 0.0);
}

TEST_CASE("Peierls drive needs site positions") {
  DriveProtocol p;
  p.kind = DriveKind::peierls;
  p.phi_max = 0.1;
  CHECK_THROWS_AS(build_driven(LatticeGraph::complete(4), {0.1, 1.0}, FockBasis(4, 2, 2), p),
                  std::invalid_argument);
  p.kind = DriveKind::delta_j;
  CHECK_NOTHROW(build_driven(LatticeGraph::complete(4), {0.1, 1.0}, FockBasis(4, 2, 2), p));
}

TEST_CASE("frozen combinations apply like their matrices") {
  const auto sq = LatticeGraph::square();
  const FockBasis b(4, 2, 2);
  DriveProtocol p;
  p.kind = DriveKind::peierls;
  p.phi_max = 0.9;
  p.omega = 2.0;
  const auto h = build_driven(sq, {0.3, 1.0}, b, p);
  const FrozenHamiltonian f(h, 0.5, {cplx(0.2, 0.1)});
  const Vector<cplx> v = Vector<cplx>::LinSpaced(b.dim(), cplx(0.0, 1.0), cplx(1.0, -2.0));
  CHECK((f.apply(v) - f.matrix() * v).norm() < 1e-13);
  CHECK(h.norm_bound(0.3) >= std::abs(h.energy(0.3, v.normalized())));
  CHECK_THROWS(FrozenHamiltonian(h, 1.0, {}));
}

TEST_CASE("particle numbers commute with every driven Hamiltonian") {
  const auto chain = LatticeGraph::chain(4);
  const FockBasis b(4, 2, 1);
  DriveProtocol p;
  p.kind = DriveKind::peierls;
  p.phi_max = 1.1;
  const auto h = build_driven(chain, {0.25, 1.0}, b, p);
  for (Spin s : {Spin::up, Spin::down}) {
    Operator<cplx> n(b.dim(), b.dim());
    for (int mu = 0; mu < 4; ++mu) n += number_matrix<cplx>(b, mu, s);
    const Operator<cplx> m = h.matrix(0.4);
    CHECK(Eigen::MatrixXcd(m * n - n * m).cwiseAbs().maxCoeff() == 0.0);
  }
}
