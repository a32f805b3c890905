#include "hubbard/fock.hpp"

#include <sstream>

namespace hubbard {

std::string_view to_string(Statistics s) {
  return s == Statistics::fermion ? "fermion" : "boson";
}

Statistics statistics_from_string(std::string_view name) {
  if (name == "fermion") return Statistics::fermion;
  if (name == "boson" || name == "hardcore_boson") return Statistics::hardcore_boson;
  throw std::invalid_argument("unknown statistics '" + std::string(name) + "'");
}

FockState product_state(std::span<const LocalState> sites) {
  if (sites.size() > static_cast<std::size_t>(kMaxSites))
    throw CapacityError("product_state: more than 16 sites");
  FockState s;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto code = static_cast<unsigned>(sites[i]);
    if (code & 1U) s.up |= Mask{1} << i;
    if (code & 2U) s.down |= Mask{1} << i;
  }
  return s;
}

FockState parse_product_state(std::string_view text, int n_sites) {
  std::vector<LocalState> sites;
  std::stringstream ss{std::string(text)};
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "0" || tok == "e") sites.push_back(LocalState::empty);
    else if (tok == "u") sites.push_back(LocalState::up);
    else if (tok == "d") sites.push_back(LocalState::down);
    else if (tok == "ud" || tok == "2") sites.push_back(LocalState::updown);
    else throw std::invalid_argument("bad site token '" + tok + "' in product state");
  }
  if (static_cast<int>(sites.size()) != n_sites)
    throw std::invalid_argument("product state has " + std::to_string(sites.size()) +
                                " sites, expected " + std::to_string(n_sites));
  return product_state(sites);
}

std::string format_product_state(const FockState& s, int n_sites) {
  static constexpr const char* names[] = {"0", "u", "d", "ud"};
  std::string out;
  for (int i = 0; i < n_sites; ++i) {
    if (i) out += ',';
    out += names[static_cast<int>(s.local(i))];
  }
  return out;
}

Index binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Index r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

FockBasis::FockBasis(int n_sites, int n_up, int n_down, Statistics stats)
    : n_sites_(n_sites), n_up_(n_up), n_down_(n_down), stats_(stats) {
  if (n_sites < 1 || n_sites > kMaxSites)
    throw CapacityError("FockBasis: n_sites must lie in [1, 16], got " + std::to_string(n_sites));
  if (n_up < 0 || n_up > n_sites || n_down < 0 || n_down > n_sites)
    throw CapacityError("FockBasis: particle numbers out of range for " +
                        std::to_string(n_sites) + " sites");

  binom_.assign(static_cast<std::size_t>(n_sites + 1),
                std::vector<Index>(static_cast<std::size_t>(n_sites + 2), 0));
  for (int n = 0; n <= n_sites; ++n)
    for (int k = 0; k <= n_sites + 1; ++k)
      binom_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = binomial(n, k);
  down_count_ = binomial(n_sites, n_down);

  std::vector<Mask> ups, downs;
  const Mask limit = Mask{1} << n_sites;
  for (Mask m = 0; m < limit; ++m) {
    if (std::popcount(m) == n_up) ups.push_back(m);
    if (std::popcount(m) == n_down) downs.push_back(m);
  }
  states_.reserve(ups.size() * downs.size());
  for (Mask u : ups)
    for (Mask d : downs) states_.push_back({u, d});
}

// Ascending numeric order of fixed-popcount masks is colex order.
Index FockBasis::rank(Mask m) const {
  Index r = 0;
  int i = 0;
  while (m) {
    const int pos = std::countr_zero(m);
    r += binom_[static_cast<std::size_t>(pos)][static_cast<std::size_t>(i + 1)];
    m &= m - 1;
    ++i;
  }
  return r;
}

bool FockBasis::contains(const FockState& s) const {
  const Mask limit = Mask{1} << n_sites_;
  return s.up < limit && s.down < limit && std::popcount(s.up) == n_up_ &&
         std::popcount(s.down) == n_down_;
}

Index FockBasis::index_of(const FockState& s) const {
  if (!contains(s)) throw std::out_of_range("FockBasis::index_of: state outside the sector");
  return rank(s.up) * down_count_ + rank(s.down);
}

Eigen::VectorXd doublon_counts(const FockBasis& basis) {
  Eigen::VectorXd d(basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) d(i) = basis.state(i).doublons();
  return d;
}

namespace {

Mask between_mask(int a, int b) {
  const int lo = std::min(a, b), hi = std::max(a, b);
  return ((Mask{1} << hi) - 1) & ~((Mask{1} << (lo + 1)) - 1);
}

std::pair<Mask, int> permute_mask(Mask m, std::span<const int> pi, bool signed_exchange) {
  int images[kMaxSites];
  int k = 0;
  Mask out = 0;
  for (Mask rest = m; rest; rest &= rest - 1) {
    const int site = std::countr_zero(rest);
    images[k++] = pi[static_cast<std::size_t>(site)];
    out |= Mask{1} << pi[static_cast<std::size_t>(site)];
  }
  int sign = 1;
  if (signed_exchange) {
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) inversions += images[i] > images[j];
    sign = (inversions & 1) ? -1 : 1;
  }
  return {out, sign};
}

}  // namespace

std::pair<FockState, int> permute_state(const FockState& s, std::span<const int> pi,
                                        Statistics stats) {
  const bool fermionic = stats == Statistics::fermion;
  auto [up, su] = permute_mask(s.up, pi, fermionic);
  auto [down, sd] = permute_mask(s.down, pi, fermionic);
  return {FockState{up, down}, su * sd};
}

namespace detail {

std::vector<SignedEntry> hop_entries(const FockBasis& basis, int mu, int nu, Spin s) {
  const int n = basis.n_sites();
  if (mu < 0 || mu >= n || nu < 0 || nu >= n)
    throw std::out_of_range("hop_matrix: site out of range");
  if (mu == nu) throw std::invalid_argument("hop_matrix: mu == nu, use number_matrix");

  const Mask to = Mask{1} << mu, from = Mask{1} << nu;
  const Mask between = between_mask(mu, nu);
  const bool fermionic = basis.statistics() == Statistics::fermion;

  std::vector<SignedEntry> entries;
  for (Index j = 0; j < basis.dim(); ++j) {
    const FockState& st = basis.state(j);
    const Mask m = st.mask(s);
    if (!(m & from) || (m & to)) continue;
    const Mask moved = m ^ from ^ to;
    const FockState target = s == Spin::up ? FockState{moved, st.down} : FockState{st.up, moved};
    const int sign = fermionic && (std::popcount(m & between) & 1) ? -1 : 1;
    entries.push_back({basis.index_of(target), j, sign});
  }
  return entries;
}

void check_permutation(std::span<const int> pi, int n_sites) {
  if (static_cast<int>(pi.size()) != n_sites)
    throw std::invalid_argument("permutation: wrong length");
  std::vector<bool> seen(static_cast<std::size_t>(n_sites), false);
  for (int p : pi) {
    if (p < 0 || p >= n_sites || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("permutation: not a bijection on sites");
    seen[static_cast<std::size_t>(p)] = true;
  }
}

std::vector<SignedEntry> permutation_entries(const FockBasis& basis, std::span<const int> pi) {
  check_permutation(pi, basis.n_sites());
  std::vector<SignedEntry> entries;
  entries.reserve(static_cast<std::size_t>(basis.dim()));
  for (Index j = 0; j < basis.dim(); ++j) {
    auto [image, sign] = permute_state(basis.state(j), pi, basis.statistics());
    entries.push_back({basis.index_of(image), j, sign});
  }
  return entries;
}

}  // namespace detail
}  // namespace hubbard
