#include "cli.hpp"

#include "hubbard/config.hpp"
#include "hubbard/dynamics.hpp"
#include "hubbard/parallel.hpp"
#include "hubbard/pumpcalc.hpp"
#include "hubbard/spectra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace hubbard::cli {

namespace {

using nlohmann::json;

/// Output with comment header lines and a CSV body.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Result {
  std::optional<Table> table;
  std::optional<json> summary;
  std::string plain;  // raw text output (sector-dim)
};

std::string header(const RunConfig& c) {
  std::ostringstream h;
  h << "# hubbard-pump " << kVersion << '\n' << "# command: " << c.command << '\n';
  std::istringstream cfg(c.emit());
  for (std::string line; std::getline(cfg, line);) h << "# " << line << '\n';
  return h.str();
}

json config_json(RunConfig c) {
  json j = json::object();
  for (auto& [key, ref] : c.fields())
    std::visit([&](auto* p) { j[std::string(key)] = *p; }, ref);
  return j;
}

std::string render_csv(const RunConfig& c, const Table& t, const std::optional<json>& inline_summary) {
  std::string s = header(c);
  if (inline_summary) s += "# summary: " + inline_summary->dump() + '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
    s += '\n';
  }
  return s;
}

// Writes every file to a temporary sibling first and renames only once all of them
// are complete, so a failed run never leaves partial results behind.
void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::string> temps;
  for (const auto& [path, content] : files) {
    const std::string tmp = path + ".tmp";
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) {
      for (const auto& t : temps) std::filesystem::remove(t);
      std::filesystem::remove(tmp);
      throw ConfigError("cannot write output file '" + path + "'");
    }
    temps.push_back(tmp);
  }
  for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(temps[i], files[i].first);
}

// ---------------------------------------------------------------------------
// config resolution

void apply_command_defaults(RunConfig& c) {
  const std::string& cmd = c.command;
  if (cmd == "evolve" || cmd == "gauge-check" || cmd == "strobe-check" || cmd == "quench-scan") {
    c.graph = "chain";
    c.j = 0.25;
  }
  if (cmd == "gauge-check") {
    c.phi_max = 0.3;
    c.omega = 1.0;
    c.periods = 5;
    c.steps_per_period = 400;
  }
  if (cmd == "strobe-check") {
    c.phi_max = 1.0;
    c.omega = 50.0;
    c.t_end = 10.0;
    c.steps_per_period = 200;
  }
  if (cmd == "resonance-scan") c.points = 60;
  if (cmd == "scaling-scan") {
    c.scan_min = 0.01;
    c.scan_max = 0.1;
    c.points = 10;
  }
  if (cmd == "amplitude-max") {
    c.scan_min = 0.01;
    c.scan_max = 1.5;
    c.points = 150;
  }
  if (cmd == "symmetric-matrix") {
    c.j = 1.0;
    c.u = 10.0;
  }
}

void resolve(RunConfig& c) {
  graph_kind_from_string(c.graph);
  if (c.statistics == "auto") c.statistics = c.graph == "chain" ? "fermion" : "boson";
  statistics_from_string(c.statistics);
  if (c.label == "auto") c.label = c.graph == "complete" ? "max_overlap" : "highest";
  if (c.label != "highest" && c.label != "max_overlap")
    throw ConfigError("label must be highest or max_overlap");
  if (c.space != "full" && c.space != "reduced") throw ConfigError("space must be full or reduced");
  if (c.graph == "square") c.sites = 4;
}

LatticeGraph make_graph(const RunConfig& c) {
  switch (graph_kind_from_string(c.graph)) {
    case GraphKind::chain: return LatticeGraph::chain(c.sites);
    case GraphKind::square: return LatticeGraph::square();
    case GraphKind::complete: return LatticeGraph::complete(c.sites);
  }
  throw ConfigError("unknown graph");
}

Statistics stats_of(const RunConfig& c) { return statistics_from_string(c.statistics); }
PairLabel label_of(const RunConfig& c) {
  return c.label == "highest" ? PairLabel::highest : PairLabel::max_overlap;
}

SymmetricSubspace subspace_of(const RunConfig& c) {
  if (c.graph == "square") return square_subspace(stats_of(c));
  if (c.graph == "complete") return build_symmetric_subspace(c.sites, stats_of(c));
  throw ConfigError("reduced problems exist for complete graphs and the square only");
}

std::optional<FockState> initial_state(const RunConfig& c) {
  if (c.initial == "ground" || c.initial.empty()) return std::nullopt;
  return parse_product_state(c.initial, c.sites);
}

json fit_json(const ScalingFit& f) {
  return {{"exponent", f.exponent},   {"prefactor", f.prefactor},
          {"r_squared", f.r_squared}, {"window", {f.window_lo, f.window_hi}},
          {"points", f.points},       {"identically_zero", f.identically_zero}};
}

// ---------------------------------------------------------------------------
// commands

Result cmd_symmetric_matrix(const RunConfig& c) {
  const SymmetricSubspace s = subspace_of(c);
  const Eigen::MatrixXd h = s.hubbard(c.j, c.u);
  Table t;
  t.columns = {"block", "row"};
  for (Index k = 0; k < s.dim(); ++k) t.columns.push_back("c" + std::to_string(k));
  json jh = json::array(), jt = json::array();
  for (int block = 0; block < 2; ++block)
    for (Index r = 0; r < s.dim(); ++r) {
      std::vector<double> row{static_cast<double>(block), static_cast<double>(r)};
      json jr = json::array();
      for (Index k = 0; k < s.dim(); ++k) {
        const double v = block == 0 ? h(r, k) : s.t_reduced(r, k);
        row.push_back(v);
        jr.push_back(v);
      }
      (block == 0 ? jh : jt).push_back(jr);
      t.rows.push_back(row);
    }
  Result res;
  res.table = t;
  res.summary = json{{"hamiltonian", jh},
                     {"perturbation", jt},
                     {"doublon_counts", s.doublon_counts},
                     {"from_krylov", s.from_krylov},
                     {"block_codes", {{"0", "hamiltonian"}, {"1", "perturbation"}}}};
  return res;
}

Result cmd_spectrum(const RunConfig& c) {
  Table t;
  t.columns = {"index", "energy", "doublons"};
  Eigen::VectorXd values, doublons;
  if (c.space == "reduced") {
    const SymmetricSubspace s = subspace_of(c);
    const auto spec = diagonalize(s.hubbard(c.j, c.u));
    values = spec.values;
    doublons = (spec.vectors.cwiseAbs2().transpose() * Eigen::Map<const Eigen::VectorXi>(
                                                           s.doublon_counts.data(), s.dim())
                                                           .cast<double>());
  } else {
    const LatticeGraph g = make_graph(c);
    if (g.n_sites % 2) throw ConfigError("spectrum: half filling needs an even site count");
    const FockBasis b(g.n_sites, g.n_sites / 2, g.n_sites / 2, stats_of(c));
    const auto spec = diagonalize(build_hubbard<double>(g, {c.j, c.u}, b));
    values = spec.values;
    doublons = spec.vectors.cwiseAbs2().transpose() * doublon_counts(b);
  }
  for (Index k = 0; k < values.size(); ++k) t.rows.push_back({double(k), values(k), doublons(k)});
  Result res;
  res.table = t;
  res.summary = json{{"ground_energy", values(0)}, {"dimension", values.size()}};
  return res;
}

Result amplitude_table(const RunConfig& c, const std::vector<double>& grid, int pairs) {
  const SymmetricSubspace s = subspace_of(c);
  const auto amps = amplitude_scan(s, pairs, grid, label_of(c));
  Result res;
  Table t;
  t.columns = {"j_over_u", "amplitude_re", "amplitude_im", "abs2"};
  std::vector<double> mag;
  bool ambiguous = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.rows.push_back({grid[i], amps[i].value.real(), amps[i].value.imag(), std::norm(amps[i].value)});
    mag.push_back(std::abs(amps[i].value));
    ambiguous = ambiguous || amps[i].ambiguous;
  }
  res.table = t;
  res.summary = json{{"ambiguous_label", ambiguous}};
  return res;
}

Result cmd_scaling_scan(const RunConfig& c) {
  const auto grid = log_grid(c.scan_min, c.scan_max, c.points);
  Result res = amplitude_table(c, grid, c.pairs);
  std::vector<double> mag;
  for (const auto& row : res.table->rows) mag.push_back(std::sqrt(row[3]));
  const ScalingFit f = scaling_fit(grid, mag);
  (*res.summary)["fit"] = fit_json(f);
  (*res.summary)["exponent"] = f.identically_zero ? json(nullptr) : json(f.exponent);
  return res;
}

Result cmd_amplitude_max(const RunConfig& c) {
  const auto grid = linear_grid(c.scan_min, c.scan_max, c.points);
  Result res = amplitude_table(c, grid, c.pairs);
  const SymmetricSubspace s = subspace_of(c);
  const auto m = amplitude_maximum(s, c.pairs, grid);
  (*res.summary)["argmax"] = m.argmax;
  (*res.summary)["max_abs2"] = m.max_value;
  (*res.summary)["interior"] = m.interior;
  (*res.summary)["unimodal"] = m.unimodal;
  return res;
}

Result cmd_resonance_scan(const RunConfig& c) {
  ResonanceSetup setup;
  setup.graph = make_graph(c);
  setup.j_over_u = c.j;
  setup.amplitude = c.amplitude;
  setup.periods = c.periods;
  setup.statistics = stats_of(c);
  if (c.u != 1.0) throw ConfigError("resonance-scan works in units of U; leave u = 1");
  const ResonanceProblem problem(setup);
  std::vector<double> omegas;
  if (c.scan_min > 0 && c.scan_max > c.scan_min) omegas = linear_grid(c.scan_min, c.scan_max, c.points);
  else omegas = default_omega_grid(problem, c.points);
  const int threads = c.threads > 0 ? c.threads : default_threads();
  const auto scan = resonance_scan(problem, omegas, threads);

  Result res;
  Table t;
  t.columns = {"omega"};
  for (int k = 0; k <= problem.max_pairs(); ++k) t.columns.push_back("p_" + std::to_string(k));
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    std::vector<double> row{omegas[i]};
    for (const auto& r : scan.responses) row.push_back(r[i]);
    t.rows.push_back(row);
  }
  json peaks = json::array(), nulls = json::array();
  for (std::size_t k = 1; k < scan.peaks.size(); ++k) {
    for (const auto& p : scan.peaks[k])
      peaks.push_back({{"pairs", k}, {"omega", p.omega}, {"height", p.height}, {"width", p.width}});
    nulls.push_back(scan.null_scan(static_cast<int>(k)));
  }
  res.table = t;
  res.summary = json{{"excitation_energies", scan.excitation_energies},
                     {"baselines", scan.baselines},
                     {"peaks", peaks},
                     {"null_scan", nulls}};
  return res;
}

Result cmd_evolve(const RunConfig& c) {
  const LatticeGraph g = make_graph(c);
  const auto init = initial_state(c);
  int nu = g.n_sites / 2, nd = g.n_sites - g.n_sites / 2;
  if (init) {
    nu = std::popcount(init->up);
    nd = std::popcount(init->down);
  }
  const FockBasis b(g.n_sites, nu, nd, stats_of(c));
  const HubbardParams params{c.j, c.u};
  DriveProtocol p;
  p.kind = drive_kind_from_string(c.drive);
  p.omega = c.omega;
  p.phi_max = c.phi_max;
  p.dj_amp = c.amplitude;
  p.envelope = envelope_from_string(c.envelope, c.t0, c.center, c.fwhm);
  const auto h = build_driven(g, params, b, p);

  Vector<cplx> psi0;
  if (init) psi0 = basis_vector<cplx>(b, *init);
  else psi0 = diagonalize(build_hubbard<double>(g, params, b)).vectors.col(0).cast<cplx>();

  EvolveOptions opt;
  opt.t_end = c.t_end;
  opt.dt = c.dt > 0 ? c.dt : recommended_dt(h, p.kind == DriveKind::none ? 0.0 : c.omega, c.u);
  opt.record_stride = c.record_stride;
  const auto traj = evolve(h, psi0, opt, standard_observables(b));

  Result res;
  Table t;
  t.columns = {"time", "norm", "energy"};
  for (const auto& n : traj.names) t.columns.push_back(n);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i], traj.norms[i], traj.energies[i]};
    for (const auto& v : traj.values) row.push_back(v[i]);
    t.rows.push_back(row);
  }
  res.table = t;
  res.summary = json{{"dt", opt.dt}, {"records", traj.times.size()}};
  return res;
}

Result cmd_quench_scan(const RunConfig& c) {
  std::vector<double> phis = parse_double_list(c.scan_list);
  if (phis.empty()) phis = log_grid(0.05, 0.2, 8);
  const auto r = quench_probability(make_graph(c), stats_of(c), c.j, c.u, phis);
  Result res;
  Table t;
  t.columns = {"phi_max", "probability"};
  for (std::size_t i = 0; i < r.phis.size(); ++i) t.rows.push_back({r.phis[i], r.probabilities[i]});
  res.table = t;
  json s{{"outside_window", r.outside_window}};
  if (r.fit_phi.points > 0) {
    s["fit_phi"] = fit_json(r.fit_phi);
    s["fit_intensity"] = fit_json(r.fit_intensity);
    s["slope"] = r.fit_phi.exponent;
  } else {
    s["slope"] = nullptr;
  }
  res.summary = s;
  return res;
}

Result cmd_effective_j(const RunConfig& c) {
  if (c.phi_max < 0) throw ConfigError("phi must be >= 0");
  const auto sup = pump::small_phase_suppression(c.phi_max);
  Result res;
  res.summary = json{{"phi_max", c.phi_max},
                     {"j0", c.j},
                     {"jbar", pump::effective_hopping(c.j, c.phi_max)},
                     {"jbar_ratio", pump::bessel_j0(c.phi_max)},
                     {"bessel_j0_quadrature", pump::bessel_j0_period_average(c.phi_max)},
                     {"small_phase_approx", sup.approx},
                     {"small_phase_exact", sup.exact},
                     {"small_phase_error", sup.error},
                     {"outside_small_phase_window", sup.outside_window},
                     {"peak_hopping_ratio", pump::peak_hopping_ratio(c.phi_max)},
                     {"peak_hopping_ratio_note", "cos(phi_max): instantaneous hopping at peak phase (interpretation)"}};
  return res;
}

Result cmd_pump_params(const RunConfig& c) {
  if (!(c.field >= 0) || !(c.spacing > 0) || !(c.photon_ev > 0))
    throw ConfigError("pump-params: need --field >= 0, --spacing > 0 and --photon-ev > 0");
  const double phi = pump::phase_amplitude({c.field, c.spacing, c.photon_ev});
  const double ratio = pump::bessel_j0(phi);
  Result res;
  json s{{"phi_max", phi},
         {"jbar_ratio", ratio},
         {"suppression_percent", 100.0 * (1.0 - ratio)},
         {"bessel_zero", pump::first_bessel_zero()},
         {"peak_hopping_ratio", pump::peak_hopping_ratio(phi)}};
  if (c.pulse_fwhm_fs > 0) s["bandwidth_limit_ev"] = pump::bandwidth_limit_ev(c.pulse_fwhm_fs * 1e-15);
  res.summary = s;
  return res;
}

Result cmd_gauge_check(const RunConfig& c) {
  GaugeCheckSetup s;
  s.chain_length = c.sites;
  s.j0 = c.j;
  s.u = c.u;
  s.phi_max = c.phi_max;
  s.omega = c.omega;
  s.periods = c.periods;
  s.steps_per_period = c.steps_per_period;
  s.initial = initial_state(c);
  s.statistics = stats_of(c);
  if (c.graph != "chain") throw ConfigError("gauge-check runs on open chains");
  const auto r = gauge_check(s);
  Result res;
  Table t;
  t.columns = {"time", "n_doublon_peierls", "n_doublon_potential"};
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.rows.push_back({r.times[i], r.doublon_peierls[i], r.doublon_potential[i]});
  res.table = t;
  res.summary = json{{"max_doublon_discrepancy", r.max_doublon_discrepancy},
                     {"max_energy_discrepancy", r.max_energy_discrepancy},
                     {"equivalent", r.max_doublon_discrepancy < 1e-6}};
  return res;
}

Result cmd_strobe_check(const RunConfig& c) {
  StroboscopicSetup s;
  s.chain_length = c.sites;
  s.j0 = c.j;
  s.u = c.u;
  s.phi_max = c.phi_max;
  s.omega = c.omega;
  s.t_total = c.t_end;
  s.steps_per_period = c.steps_per_period;
  s.initial = initial_state(c);
  s.statistics = stats_of(c);
  if (c.graph != "chain") throw ConfigError("strobe-check runs on open chains");
  const auto r = stroboscopic_fidelity(s);
  Result res;
  res.summary = json{{"jbar", r.jbar},
                     {"periods", r.periods},
                     {"max_fidelity_deficit", r.max_deficit},
                     {"max_doublon_change", r.max_doublon_change},
                     {"static_doublon_change", r.static_doublon_change}};
  return res;
}

// ---------------------------------------------------------------------------

std::string first_command(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;
      continue;
    }
    if (!args[i].empty() && args[i][0] != '-') return args[i];
  }
  return {};
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

void error_line(std::ostream& err, int code, std::string_view kind, std::string message) {
  for (char& ch : message)
    if (ch == '\n' || ch == '\r') ch = ' ';
  err << json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.command = first_command(args);
  int sector_n = 0, sector_up = 0, sector_down = 0;
  std::string config_file;

  CLI::App app{"Pair creation in driven Hubbard clusters", "hubbard-pump"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  try {
    apply_command_defaults(cfg);
    if (auto path = config_path(args)) {
      std::ifstream f(*path);
      if (!f) throw ConfigError("cannot read config file '" + *path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      const std::string command = cfg.command;
      cfg.merge(ss.str());
      cfg.command = command;
    }
  } catch (const std::exception& e) {
    error_line(err, kConfigError, "config", e.what());
    return kConfigError;
  }

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "flat key = value config file; flags override it");
    sub->add_option("--output,-o", cfg.output, "write the CSV (or JSON) result here");
    sub->add_option("--json", cfg.json, "write the JSON summary here");
    sub->add_option("--threads", cfg.threads, "worker threads for scans (default: all cores)");
  };
  auto lattice = [&](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph, "complete | square | chain")->capture_default_str();
    sub->add_option("--sites,-N", cfg.sites, "number of sites")->capture_default_str();
    sub->add_option("--statistics", cfg.statistics, "boson | fermion | auto")->capture_default_str();
  };
  auto hubbard_params = [&](CLI::App* sub) {
    sub->add_option("--j,--j0,--j-over-u", cfg.j, "hopping J (in units of U when u = 1)")
        ->capture_default_str();
    sub->add_option("--u", cfg.u, "on-site interaction U")->capture_default_str();
  };

  std::map<std::string, std::function<Result(const RunConfig&)>> handlers;
  std::map<std::string, CLI::App*> subs;
  auto add = [&](const std::string& name, const std::string& help,
                 std::function<Result(const RunConfig&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    handlers[name] = std::move(fn);
    subs[name] = sub;
    return sub;
  };

  {
    auto* s = app.add_subcommand("sector-dim", "dimension of the (N, N_up, N_down) sector");
    s->add_option("N", sector_n)->required();
    s->add_option("nup", sector_up)->required();
    s->add_option("ndown", sector_down)->required();
    subs["sector-dim"] = s;
  }
  {
    auto* s = add("symmetric-matrix", "reduced Hubbard and perturbation matrices", cmd_symmetric_matrix);
    lattice(s);
    hubbard_params(s);
    common(s);
  }
  {
    auto* s = add("spectrum", "eigenvalues of the full-sector or reduced Hamiltonian", cmd_spectrum);
    lattice(s);
    hubbard_params(s);
    s->add_option("--space", cfg.space, "full | reduced")->capture_default_str();
    s->add_flag_callback("--reduced", [&] { cfg.space = "reduced"; }, "same as --space reduced");
    common(s);
  }
  auto scan_opts = [&](CLI::App* s) {
    lattice(s);
    s->add_option("--pairs,-n", cfg.pairs, "number of pairs n")->capture_default_str();
    s->add_option("--jmin", cfg.scan_min, "smallest J/U")->capture_default_str();
    s->add_option("--jmax", cfg.scan_max, "largest J/U")->capture_default_str();
    s->add_option("--points", cfg.points, "grid points")->capture_default_str();
    s->add_option("--label", cfg.label, "highest | max_overlap | auto")->capture_default_str();
    common(s);
  };
  scan_opts(add("scaling-scan", "pair amplitudes on a log grid with a power-law fit", cmd_scaling_scan));
  scan_opts(add("amplitude-max", "location of the maximal pair amplitude", cmd_amplitude_max));
  {
    auto* s = add("resonance-scan", "driven pair populations against drive frequency", cmd_resonance_scan);
    lattice(s);
    hubbard_params(s);
    s->add_option("--omega-min", cfg.scan_min, "lowest frequency (0: automatic)");
    s->add_option("--omega-max", cfg.scan_max, "highest frequency (0: automatic)");
    s->add_option("--points", cfg.points, "frequency points")->capture_default_str();
    s->add_option("--amp", cfg.amplitude, "ΔJ amplitude, at most 0.2 J")->capture_default_str();
    s->add_option("--periods", cfg.periods, "pulse length in drive periods")->capture_default_str();
    common(s);
  }
  auto drive_opts = [&](CLI::App* s) {
    s->add_option("--drive", cfg.drive, "none | peierls | delta_j | potential")->capture_default_str();
    s->add_option("--omega", cfg.omega, "drive frequency")->capture_default_str();
    s->add_option("--phi-max", cfg.phi_max, "Peierls phase amplitude")->capture_default_str();
    s->add_option("--amp", cfg.amplitude, "ΔJ amplitude")->capture_default_str();
    s->add_option("--envelope", cfg.envelope, "constant | sudden | gaussian")->capture_default_str();
    s->add_option("--t0", cfg.t0, "switch-on time of the sudden envelope");
    s->add_option("--center", cfg.center, "gaussian envelope center");
    s->add_option("--fwhm", cfg.fwhm, "gaussian envelope full width at half maximum");
  };
  {
    auto* s = add("evolve", "time evolution with trajectory output", cmd_evolve);
    lattice(s);
    hubbard_params(s);
    drive_opts(s);
    s->add_option("--t-end", cfg.t_end, "final time")->capture_default_str();
    s->add_option("--dt", cfg.dt, "time step (0: automatic)")->capture_default_str();
    s->add_option("--record-stride", cfg.record_stride, "record every n-th step")->capture_default_str();
    s->add_option("--initial", cfg.initial, "ground or a product state such as ud,0,u,d");
    common(s);
  }
  {
    auto* s = add("quench-scan", "ground-state quench J0 -> J0 (1 - phi^2/4)", cmd_quench_scan);
    lattice(s);
    hubbard_params(s);
    s->add_option("--phi-list", cfg.scan_list, "comma separated phi_max values");
    common(s);
  }
  {
    auto* s = add("effective-j", "Bessel-renormalized hopping", cmd_effective_j);
    s->add_option("--phi,--phi-max", cfg.phi_max, "phase amplitude")->required();
    s->add_option("--j,--j0", cfg.j, "bare hopping")->capture_default_str();
    common(s);
  }
  {
    auto* s = add("pump-params", "Peierls phase and hopping suppression of a pump field", cmd_pump_params);
    s->add_option("--field", cfg.field, "field amplitude in V/m")->required();
    s->add_option("--spacing", cfg.spacing, "lattice spacing in m")->required();
    s->add_option("--photon-ev", cfg.photon_ev, "photon energy in eV")->required();
    s->add_option("--pulse-fwhm-fs", cfg.pulse_fwhm_fs, "pulse duration for the bandwidth limit");
    common(s);
  }
  auto chain_check = [&](CLI::App* s) {
    lattice(s);
    hubbard_params(s);
    s->add_option("--phi-max", cfg.phi_max, "Peierls phase amplitude")->capture_default_str();
    s->add_option("--omega", cfg.omega, "drive frequency")->capture_default_str();
    s->add_option("--steps-per-period", cfg.steps_per_period, "integrator steps per period")
        ->capture_default_str();
    s->add_option("--initial", cfg.initial, "ground or a product state");
    common(s);
  };
  {
    auto* s = add("gauge-check", "Peierls against scalar-potential gauge", cmd_gauge_check);
    chain_check(s);
    s->add_option("--periods", cfg.periods, "drive periods")->capture_default_str();
  }
  {
    auto* s = add("strobe-check", "high-frequency drive against static J̄ dynamics", cmd_strobe_check);
    chain_check(s);
    s->add_option("--t-total", cfg.t_end, "total time")->capture_default_str();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << "hubbard-pump " << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    error_line(err, kConfigError, "config", e.what());
    return kConfigError;
  }

  try {
    if (cfg.command == "sector-dim") {
      out << FockBasis(sector_n, sector_up, sector_down).dim() << '\n';
      return kOk;
    }
    resolve(cfg);
    const Result res = handlers.at(cfg.command)(cfg);

    std::optional<json> summary;
    if (res.summary) {
      summary = *res.summary;
      (*summary)["version"] = std::string(kVersion);
      (*summary)["command"] = cfg.command;
      (*summary)["config"] = config_json(cfg);
    }
    std::vector<std::pair<std::string, std::string>> files;
    std::string to_stdout;
    if (res.table) {
      const bool inline_summary = summary && cfg.json.empty() && cfg.output.empty();
      const std::string csv = render_csv(cfg, *res.table, inline_summary ? summary : std::nullopt);
      if (cfg.output.empty()) to_stdout += csv;
      else files.emplace_back(cfg.output, csv);
      if (summary && !cfg.json.empty()) files.emplace_back(cfg.json, summary->dump(2) + '\n');
      else if (summary && !cfg.output.empty()) to_stdout += summary->dump(2) + '\n';
    } else if (summary) {
      const std::string text = summary->dump(2) + '\n';
      const std::string& path = !cfg.json.empty() ? cfg.json : cfg.output;
      if (path.empty()) to_stdout += text;
      else files.emplace_back(path, text);
    }
    write_files(files);
    out << to_stdout;
    return kOk;
  } catch (const NumericalError& e) {
    error_line(err, kNumericalError, "numerical", e.what());
    return kNumericalError;
  } catch (const NullProjection& e) {
    error_line(err, kConfigError, "config", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    error_line(err, kConfigError, "config", e.what());
    return kConfigError;
  } catch (const std::out_of_range& e) {
    error_line(err, kConfigError, "config", e.what());
    return kConfigError;
  } catch (const std::length_error& e) {
    error_line(err, kConfigError, "config", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    error_line(err, kNumericalError, "numerical", e.what());
    return kNumericalError;
  }
}

}  // namespace hubbard::cli
