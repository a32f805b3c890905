#include "hubbard/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace hubbard {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw ConfigError("expected a number, got an empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("not a number: '" + s + "'");
  return v;
}

int parse_int(std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE ||
      v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min())
    throw ConfigError("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::pair<std::string_view, RunConfig::FieldRef>> RunConfig::fields() {
  return {
      {"command", &command},     {"graph", &graph},
      {"sites", &sites},         {"statistics", &statistics},
      {"initial", &initial},     {"j", &j},
      {"u", &u},                 {"pairs", &pairs},
      {"label", &label},         {"space", &space},
      {"drive", &drive},
      {"omega", &omega},         {"phi_max", &phi_max},
      {"amplitude", &amplitude}, {"envelope", &envelope},
      {"t0", &t0},               {"center", &center},
      {"fwhm", &fwhm},           {"t_end", &t_end},
      {"dt", &dt},               {"periods", &periods},
      {"steps_per_period", &steps_per_period},
      {"record_stride", &record_stride},
      {"scan_min", &scan_min},   {"scan_max", &scan_max},
      {"points", &points},       {"scan_list", &scan_list},
      {"field", &field},         {"spacing", &spacing},
      {"photon_ev", &photon_ev}, {"pulse_fwhm_fs", &pulse_fwhm_fs},
      {"output", &output},
      {"json", &json},
  };
}

std::string RunConfig::emit() const {
  std::ostringstream out;
  for (auto& [key, ref] : const_cast<RunConfig*>(this)->fields()) {
    out << key << " = ";
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, double>) out << format_double(*p);
          else out << *p;
        },
        ref);
    out << '\n';
  }
  return out.str();
}

void RunConfig::set(std::string_view key, std::string_view value) {
  for (auto& [name, ref] : fields()) {
    if (name != key) continue;
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, double>) *p = parse_double(value);
          else if constexpr (std::is_same_v<T, int>) *p = parse_int(value);
          else *p = std::string(value);
        },
        ref);
    return;
  }
  if (key == "threads") {
    threads = parse_int(value);
    return;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void RunConfig::merge(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view line =
        trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    ++line_no;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  c.merge(text);
  return c;
}

bool RunConfig::operator==(const RunConfig& other) const { return emit() == other.emit(); }

}  // namespace hubbard
