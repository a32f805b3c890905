#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hubbard {

inline constexpr std::string_view kVersion = "1.0.0";

/// Invalid or inconsistent run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every knob of a CLI run. Emitted as flat `key = value` text; parsing the emitted
/// text reproduces the same values bit for bit. The thread count is deliberately not
/// part of the emitted config because it never changes any output.
struct RunConfig {
  std::string command;

  // lattice
  std::string graph = "complete";  // complete | square | chain
  int sites = 4;
  std::string statistics = "auto";  // boson | fermion; auto picks fermion on chains
  std::string initial = "ground";    // "ground" or a product state such as "ud,0,u,d"

  // Hubbard parameters
  double j = 0.1;
  double u = 1.0;
  int pairs = 2;
  std::string label = "auto";  // highest | max_overlap; auto picks highest on the square
  std::string space = "full";  // full | reduced

  // drive
  std::string drive = "none";  // none | peierls | delta_j | potential
  double omega = 1.0;
  double phi_max = 0.0;
  double amplitude = 0.02;
  std::string envelope = "constant";  // constant | sudden | gaussian
  double t0 = 0.0;
  double center = 0.0;
  double fwhm = 1.0;
  double t_end = 10.0;
  double dt = 0.0;  // 0 selects 0.02 / max(omega, U, ‖H‖)
  int periods = 40;
  int steps_per_period = 200;
  int record_stride = 1;

  // scans
  double scan_min = 0.0;
  double scan_max = 0.0;
  int points = 0;
  std::string scan_list;  // comma separated values

  // pump field
  double field = 0.0;
  double spacing = 0.0;
  double photon_ev = 0.0;
  double pulse_fwhm_fs = 0.0;  // optional, adds the bandwidth limit

  // outputs ("" writes to stdout)
  std::string output;
  std::string json;

  int threads = 0;  // not serialized

  using FieldRef = std::variant<std::string*, double*, int*>;
  std::vector<std::pair<std::string_view, FieldRef>> fields();

  std::string emit() const;
  static RunConfig parse(std::string_view text);
  /// Applies `key = value` lines on top of the current values.
  void merge(std::string_view text);
  void set(std::string_view key, std::string_view value);

  bool operator==(const RunConfig&) const;
};

/// Shortest text that reads back to exactly `x` (17 significant digits).
std::string format_double(double x);
double parse_double(std::string_view text);
int parse_int(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);

}  // namespace hubbard
