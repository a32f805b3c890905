#include "hubbard/model.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace hubbard {

LatticeGraph LatticeGraph::chain(int length) {
  if (length < 2 || length > kMaxSites) throw CapacityError("chain: length must lie in [2, 16]");
  LatticeGraph g;
  g.kind = GraphKind::chain;
  g.n_sites = length;
  for (int mu = 0; mu + 1 < length; ++mu) g.edges.emplace_back(mu, mu + 1);
  for (int mu = 0; mu < length; ++mu) g.positions.push_back(mu);
  return g;
}

LatticeGraph LatticeGraph::square() {
  LatticeGraph g;
  g.kind = GraphKind::square;
  g.n_sites = 4;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  // Corners of the unit square; the field axis is x.
  g.positions = {0.0, 1.0, 1.0, 0.0};
  return g;
}

LatticeGraph LatticeGraph::complete(int n) {
  if (n < 2 || n > kMaxSites) throw CapacityError("complete: n must lie in [2, 16]");
  LatticeGraph g;
  g.kind = GraphKind::complete;
  g.n_sites = n;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) g.edges.emplace_back(a, b);
  return g;
}

std::string LatticeGraph::name() const {
  switch (kind) {
    case GraphKind::chain: return "chain" + std::to_string(n_sites);
    case GraphKind::square: return "square";
    case GraphKind::complete: return "K" + std::to_string(n_sites);
  }
  return "?";
}

int LatticeGraph::coordination() const {
  int z = 0;
  for (auto [a, b] : edges) z += (a == 0) + (b == 0);
  return z;
}

GraphKind graph_kind_from_string(std::string_view name) {
  if (name == "chain") return GraphKind::chain;
  if (name == "square" || name == "cycle") return GraphKind::square;
  if (name == "complete") return GraphKind::complete;
  throw std::invalid_argument("unknown graph '" + std::string(name) + "'");
}

const HubbardParams& HubbardParams::validated() const {
  if (!std::isfinite(j0) || !std::isfinite(u) || !(u > 0.0))
    throw std::invalid_argument("HubbardParams: require finite J0 and U > 0");
  return *this;
}

DriveKind drive_kind_from_string(std::string_view name) {
  if (name == "none") return DriveKind::none;
  if (name == "peierls") return DriveKind::peierls;
  if (name == "delta_j" || name == "delta-j") return DriveKind::delta_j;
  if (name == "potential") return DriveKind::potential;
  throw std::invalid_argument("unknown drive kind '" + std::string(name) + "'");
}

std::string_view to_string(DriveKind k) {
  switch (k) {
    case DriveKind::none: return "none";
    case DriveKind::peierls: return "peierls";
    case DriveKind::delta_j: return "delta_j";
    case DriveKind::potential: return "potential";
  }
  return "?";
}

double Envelope::operator()(double t) const {
  switch (kind) {
    case EnvelopeKind::constant: return 1.0;
    case EnvelopeKind::sudden_on: return t >= t0 ? 1.0 : 0.0;
    case EnvelopeKind::gaussian: {
      const double x = (t - center) / fwhm;
      return std::exp(-4.0 * std::numbers::ln2 * x * x);
    }
  }
  return 1.0;
}

std::string Envelope::name() const {
  switch (kind) {
    case EnvelopeKind::constant: return "constant";
    case EnvelopeKind::sudden_on: return "sudden";
    case EnvelopeKind::gaussian: return "gaussian";
  }
  return "?";
}

Envelope envelope_from_string(std::string_view name, double t0, double center, double fwhm) {
  Envelope e;
  e.t0 = t0;
  e.center = center;
  e.fwhm = fwhm;
  if (name == "constant") e.kind = EnvelopeKind::constant;
  else if (name == "sudden" || name == "sudden_on") e.kind = EnvelopeKind::sudden_on;
  else if (name == "gaussian") {
    if (!(fwhm > 0.0)) throw std::invalid_argument("gaussian envelope needs fwhm > 0");
    e.kind = EnvelopeKind::gaussian;
  } else throw std::invalid_argument("unknown envelope '" + std::string(name) + "'");
  return e;
}

double peierls_phase(const DriveProtocol& protocol, double t) {
  if (protocol.kind != DriveKind::peierls)
    throw std::invalid_argument("peierls_phase: protocol is not a Peierls drive");
  return protocol.phi_max * std::sin(protocol.omega * t) * protocol.envelope(t);
}

FrozenHamiltonian::FrozenHamiltonian(const TimeDependentHamiltonian& h, double static_weight,
                                     std::vector<cplx> coefficients)
    : h_(&h), static_weight_(static_weight), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != h.drive_terms().size())
    throw std::invalid_argument("FrozenHamiltonian: coefficient count mismatch");
}

Index FrozenHamiltonian::dim() const { return h_->dim(); }

void FrozenHamiltonian::apply(const Vector<cplx>& v, Vector<cplx>& out) const {
  out.noalias() = h_->static_part() * v;
  if (static_weight_ != 1.0) out *= static_weight_;
  const auto& terms = h_->drive_terms();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    out.noalias() += coeffs_[k] * (terms[k].op * v);
    if (terms[k].add_adjoint) out.noalias() += std::conj(coeffs_[k]) * (terms[k].adjoint * v);
  }
}

Vector<cplx> FrozenHamiltonian::apply(const Vector<cplx>& v) const {
  Vector<cplx> out(v.size());
  apply(v, out);
  return out;
}

Operator<cplx> FrozenHamiltonian::matrix() const {
  Operator<cplx> m = cplx(static_weight_) * h_->static_part();
  const auto& terms = h_->drive_terms();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    m += coeffs_[k] * terms[k].op;
    if (terms[k].add_adjoint) m += std::conj(coeffs_[k]) * terms[k].adjoint;
  }
  return m;
}

TimeDependentHamiltonian::TimeDependentHamiltonian(Operator<cplx> static_part,
                                                   std::vector<DriveTerm> drive)
    : static_part_(std::move(static_part)), drive_(std::move(drive)) {
  for (auto& term : drive_) {
    if (term.op.rows() != static_part_.rows() || term.op.cols() != static_part_.cols())
      throw std::invalid_argument("TimeDependentHamiltonian: drive term dimension mismatch");
    term.adjoint = term.op.adjoint();
  }
}

std::vector<cplx> TimeDependentHamiltonian::coefficients(double t) const {
  std::vector<cplx> c;
  c.reserve(drive_.size());
  for (const auto& term : drive_) c.push_back(term.coefficient(t));
  return c;
}

FrozenHamiltonian TimeDependentHamiltonian::at(double t) const {
  return FrozenHamiltonian(*this, 1.0, coefficients(t));
}

double TimeDependentHamiltonian::energy(double t, const Vector<cplx>& psi) const {
  return psi.dot(at(t).apply(psi)).real();
}

namespace {

Eigen::VectorXd abs_row_sums(const Operator<cplx>& m) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m.rows());
  for (Index k = 0; k < m.outerSize(); ++k)
    for (Operator<cplx>::InnerIterator it(m, k); it; ++it) r(it.row()) += std::abs(it.value());
  return r;
}

}  // namespace

double TimeDependentHamiltonian::norm_bound(double t) const {
  Eigen::VectorXd r = abs_row_sums(static_part_);
  const auto c = coefficients(t);
  for (std::size_t k = 0; k < drive_.size(); ++k) {
    r += std::abs(c[k]) * abs_row_sums(drive_[k].op);
    if (drive_[k].add_adjoint) r += std::abs(c[k]) * abs_row_sums(drive_[k].adjoint);
  }
  return r.size() ? r.maxCoeff() : 0.0;
}

TimeDependentHamiltonian build_driven(const LatticeGraph& graph, const HubbardParams& params,
                                      const FockBasis& basis, const DriveProtocol& protocol) {
  params.validated();
  const bool oscillating = protocol.kind != DriveKind::none;
  if (oscillating && !(protocol.omega > 0.0))
    throw std::invalid_argument("build_driven: omega must be positive");

  switch (protocol.kind) {
    case DriveKind::none:
      return TimeDependentHamiltonian(build_hubbard<cplx>(graph, params, basis));

    case DriveKind::delta_j: {
      const double amp = protocol.dj_amp, omega = protocol.omega;
      const Envelope env = protocol.envelope;
      DriveTerm term;
      term.op = hopping_sum<cplx>(graph, basis);
      term.coefficient = [=](double t) { return cplx(amp * std::sin(omega * t) * env(t)); };
      return TimeDependentHamiltonian(build_hubbard<cplx>(graph, params, basis), {term});
    }

    case DriveKind::potential: {
      if (!graph.has_positions())
        throw std::invalid_argument("build_driven: potential drive needs site positions");
      const double phi = protocol.phi_max, omega = protocol.omega;
      const Envelope env = protocol.envelope;
      DriveTerm term;
      term.op = dipole_matrix<cplx>(graph, basis);
      // V_mu(t) = -x_mu phi_max omega cos(omega t) envelope(t)
      term.coefficient = [=](double t) {
        return cplx(-phi * omega * std::cos(omega * t) * env(t));
      };
      return TimeDependentHamiltonian(build_hubbard<cplx>(graph, params, basis), {term});
    }

    case DriveKind::peierls: {
      if (!graph.has_positions())
        throw std::invalid_argument(
            "build_driven: Peierls drive needs a field direction; use delta_j on complete graphs");
      Operator<cplx> static_part = cplx(params.u) * doublon_matrix<cplx>(basis);
      // Bonds grouped by their displacement along the field axis; c†_a c_b picks up
      // exp(i Δφ(t) (x_b - x_a)).
      std::map<long, Operator<cplx>> by_shift;
      for (auto [a, b] : graph.edges) {
        double dx = graph.positions[static_cast<std::size_t>(b)] -
                    graph.positions[static_cast<std::size_t>(a)];
        if (dx < 0) {
          std::swap(a, b);
          dx = -dx;
        }
        Operator<cplx> forward = hop_matrix<cplx>(basis, a, b, Spin::up) +
                                 hop_matrix<cplx>(basis, a, b, Spin::down);
        if (dx == 0.0) {
          static_part -= cplx(params.j0) * (forward + Operator<cplx>(forward.adjoint()));
          continue;
        }
        const long key = std::lround(dx * 1e6);
        auto [it, inserted] = by_shift.try_emplace(key, forward);
        if (!inserted) it->second += forward;
      }
      std::vector<DriveTerm> terms;
      const DriveProtocol p = protocol;
      const double j0 = params.j0;
      for (auto& [key, op] : by_shift) {
        const double dx = static_cast<double>(key) * 1e-6;
        DriveTerm term;
        term.op = std::move(op);
        term.add_adjoint = true;
        term.coefficient = [=](double t) {
          return -j0 * std::exp(cplx(0.0, peierls_phase(p, t) * dx));
        };
        terms.push_back(std::move(term));
      }
      return TimeDependentHamiltonian(std::move(static_part), std::move(terms));
    }
  }
  throw std::invalid_argument("build_driven: unknown drive kind");
}

}  // namespace hubbard
