#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gshs/assumptions.hpp"
#include "gshs/config.hpp"
#include "gshs/csv.hpp"
#include "gshs/ensemble_io.hpp"
#include "gshs/error.hpp"
#include "gshs/experiments.hpp"
#include "gshs/generator.hpp"
#include "gshs/parallel.hpp"
#include "gshs/report.hpp"
#include "gshs/scaling.hpp"
#include "gshs/test_functions.hpp"

namespace fs = std::filesystem;

namespace gshs::cli {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out;
  bool force = false;
  bool no_compensator = false;
  bool csv = false;
  std::string input;
};

// Thrown to leave a subcommand with a specific exit code.
struct Exit {
  int code;
};

struct Context {
  Flags flags;
  ExperimentConfig cfg;
  std::uint64_t hash = 0;
  PotentialSpec phi1, phi2;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidInput, "cannot write '" + p.string() + "'");
  f << content;
  if (!f) fail(ErrorKind::InvalidInput, "write failed for '" + p.string() + "'");
}

// Plots are advisory; a failure is reported but never changes the exit code.
void write_plot(Context& c, const fs::path& p, const std::function<std::string()>& make) {
  try {
    write_file(p, make());
  } catch (const std::exception& e) {
    c.err << "warning: plot " << p.string() << " not written: " << e.what() << "\n";
  }
}

Context load(const Flags& f, std::ostream& out, std::ostream& err) {
  Context c{f, {}, 0, {}, {}, {}, out, err};
  if (!f.config.empty()) c.cfg = load_config(f.config);
  if (f.seed) c.cfg.seed = *f.seed;
  c.cfg.workers = resolve_workers(f.workers ? *f.workers : c.cfg.workers, true);
  c.cfg.sde.seed = c.cfg.seed;
  c.cfg.sde.workers = c.cfg.workers;
  if (!f.out.empty()) c.cfg.output = f.out;
  c.hash = config_hash(c.cfg);
  c.phi1 = make_potential(c.cfg.phi1);
  c.phi2 = make_potential(c.cfg.phi2);
  c.out_dir = c.cfg.output;
  fs::create_directories(c.out_dir);
  return c;
}

int report_checks(Context& c, const ConvergenceReport& rep) {
  for (const auto& ch : rep.checks)
    c.out << (ch.skipped ? "SKIP " : (ch.passed ? "PASS " : "FAIL ")) << ch.name << ": " << ch.detail << "\n";
  for (const auto& n : rep.notes) c.out << "note: " << n << "\n";
  return rep.passed() ? kOk : kCheckFailed;
}

void emit_report(Context& c, const std::string& stem, const ConvergenceReport& rep) {
  write_file(c.out_dir / (stem + ".csv"), rep.to_csv(c.hash));
  write_file(c.out_dir / (stem + "_checks.csv"), rep.checks_csv(c.hash));
}

AssumptionReport validate(Context& c) {
  ValidationOptions vo;
  vo.seed = c.cfg.seed;
  AssumptionReport rep = validate_assumptions(c.phi1, c.phi2, vo);
  write_file(c.out_dir / "assumptions.csv", rep.to_csv(c.hash));
  return rep;
}

// Simulation commands refuse to run on potentials with a checkable violation.
void preflight(Context& c) {
  AssumptionReport rep = validate(c);
  if (!rep.has_violation()) return;
  std::string names;
  for (const auto& v : rep.violations()) names += (names.empty() ? "" : ", ") + v;
  if (!c.flags.force) {
    c.err << "refusing to run: assumptions violated: " << names << " (use --force to override)\n";
    throw Exit{kRefused};
  }
  c.err << "warning: assumptions violated: " << names << "; continuing because of --force\n";
}

void stiffness_preflight(Context& c, SdeConfig& sde) {
  if (auto msg = stiffness_violation(sde, c.phi2)) {
    if (!c.flags.force) {
      c.err << "refusing to run: " << *msg << " (use --force to override)\n";
      throw Exit{kRefused};
    }
    c.err << "warning: " << *msg << "; continuing because of --force\n";
    sde.enforce_stiffness = false;
  }
}

int cmd_validate(Context& c) {
  AssumptionReport rep = validate(c);
  for (const auto& e : rep.entries) {
    c.out << e.name << ": " << to_string(e.status);
    if (!e.notes.empty()) c.out << " (" << e.notes << ")";
    c.out << "\n";
  }
  if (rep.has_violation()) {
    std::string names;
    for (const auto& v : rep.violations()) names += (names.empty() ? "" : ", ") + v;
    c.out << "violated: " << names << "\n";
    return kCheckFailed;
  }
  return kOk;
}

int cmd_simulate(Context& c) {
  preflight(c);
  SdeConfig sde = c.cfg.sde;
  stiffness_preflight(c, sde);
  InitialDistribution init = make_initial(c.cfg.initial, GibbsMeasure::joint(c.phi1, c.phi2));
  if (!init.h_sup()) c.err << "warning: sup of h is not certified\n";
  PathEnsemble ens = simulate_gshs(c.phi1, c.phi2, init, sde);
  ens.config_hash = c.hash;
  {
    std::ofstream f(c.out_dir / "ensemble.bin", std::ios::binary);
    write_binary(ens, f);
    if (!f) fail(ErrorKind::InvalidInput, "cannot write ensemble.bin");
  }
  if (c.flags.csv) {
    std::ofstream f(c.out_dir / "ensemble.csv", std::ios::binary);
    write_csv(ens, f);
  }
  c.out << "paths: " << ens.n_paths << ", recorded times: " << ens.grid() << ", guard shrinks: " << ens.guard.shrinks
        << ", redraws: " << ens.guard.redraws << ", unrecovered: " << ens.guard.unrecovered << "\n";
  c.out << "config_hash: " << hex64(c.hash) << "\n";
  return ens.guard.unrecovered == 0 ? kOk : kCheckFailed;
}

int cmd_overdamped_limit(Context& c) {
  preflight(c);
  const auto& s = c.cfg.statistics;
  LimitOptions o;
  o.eps_grid = c.cfg.eps_grid;
  o.times = s.times;
  o.n_paths = s.n_paths;
  o.seed = c.cfg.seed;
  o.workers = c.cfg.workers;
  o.permutations = s.permutations;
  o.initial = c.cfg.initial;
  o.record_dt = s.record_dt;
  o.reference_dt = s.reference_dt;
  o.no_compensator = c.flags.no_compensator;
  o.battery_paths = s.battery_paths;
  ConvergenceReport rep = overdamped_limit_experiment(c.phi1, c.phi2, o);
  emit_report(c, "overdamped_limit", rep);
  write_plot(c, c.out_dir / "overdamped_limit.svg", [&] {
    return svg_plot("energy distance to the overdamped limit", "eps", "energy distance",
                    {{"energy distance", rep.column("eps"), rep.column("energy_distance"), {}, {}}}, true, true);
  });
  return report_checks(c, rep);
}

int cmd_semigroup(Context& c) {
  const auto& g = c.cfg.semigroup;
  if (g.bump_center.size() != c.phi1.dim())
    throw ConfigError("semigroup.bump_center must have dimension " + std::to_string(c.phi1.dim()));
  TestFn f = bump(g.bump_center, g.bump_radius);
  ScalingOptions so;
  so.rel_tol = g.rel_tol;
  ConvergenceReport rep = semigroup_report(*f, c.phi1, c.phi2, c.cfg.eps_grid, so);
  emit_report(c, "semigroup", rep);
  write_plot(c, c.out_dir / "semigroup.svg", [&] {
    std::vector<PlotSeries> s{{"relative norm error", rep.column("eps"), rep.column("relative_error"), {}, {}}};
    for (const char* t : {"term1", "term2", "term3", "term4", "term5_distance"})
      s.push_back({t, rep.column("eps"), rep.column(t), {}, {}});
    return svg_plot("embedded norms and generator summands", "eps", "value", s, true, true);
  });
  return report_checks(c, rep);
}

int cmd_martingale(Context& c) {
  preflight(c);
  SdeConfig sde = c.cfg.sde;
  stiffness_preflight(c, sde);
  MartingaleExperimentOptions o;
  o.eps = sde.eps;
  o.t_end = sde.t_end;
  o.dt = sde.dt;
  o.record_dt = c.cfg.statistics.record_dt;
  o.n_paths = sde.n_paths;
  o.seed = c.cfg.seed;
  o.workers = c.cfg.workers;
  o.pairs = c.cfg.statistics.pairs;
  o.no_compensator = c.flags.no_compensator;
  MartingaleExperimentResult res = martingale_experiment(c.phi1, c.phi2, o);
  const auto& rep = res.report;
  write_file(c.out_dir / "martingale_qv.csv", rep.to_csv(c.hash));
  write_file(c.out_dir / "martingale_checks.csv", rep.checks_csv(c.hash));
  std::string z = csv_row({"function", "s", "t", "weight", "z", "skipped", "note"});
  for (std::size_t i = 0; i < res.zscores.size(); ++i) {
    const auto& r = res.zscores[i];
    z += csv_row({res.zscore_functions[i], format_double(r.s), format_double(r.t), r.weight, format_double(r.z),
                  r.skipped ? "1" : "0", r.note});
  }
  write_file(c.out_dir / "martingale_zscores.csv", z + config_hash_line(c.hash) + "\r\n");
  write_plot(c, c.out_dir / "martingale_qv.svg", [&] {
    return svg_plot("quadratic variation of M^[g_1]", "t", "QV",
                    {{"empirical QV", rep.column("t"), rep.column("qv_g1"), rep.column("qv_lo"), rep.column("qv_hi")},
                     {"compensator", rep.column("t"), rep.column("compensator_g1"), {}, {}}},
                    false, false);
  });
  return report_checks(c, rep);
}

int cmd_tightness(Context& c) {
  preflight(c);
  TightnessOptions o;
  o.eps_grid = c.cfg.eps_grid;
  o.lags = c.cfg.statistics.lags;
  o.n_paths = c.cfg.sde.n_paths;
  o.seed = c.cfg.seed;
  o.workers = c.cfg.workers;
  o.t_end = c.cfg.sde.t_end;
  ConvergenceReport rep = tightness_experiment(c.phi1, c.phi2, o);
  emit_report(c, "tightness", rep);
  return report_checks(c, rep);
}

int cmd_rescaling(Context& c) {
  preflight(c);
  RescalingOptions o;
  o.eps_grid = c.cfg.eps_grid;
  o.times = c.cfg.statistics.times;
  o.n_paths = c.cfg.statistics.n_paths;
  o.seed = c.cfg.seed;
  o.workers = c.cfg.workers;
  o.permutations = c.cfg.statistics.permutations;
  o.record_dt = c.cfg.statistics.record_dt;
  ConvergenceReport rep = rescaling_experiment(c.phi1, c.phi2, o);
  emit_report(c, "rescaling", rep);
  return report_checks(c, rep);
}

int cmd_invariance(Context& c) {
  const auto& g = c.cfg.semigroup;
  const std::size_t d = c.phi1.dim();
  if (g.bump_center.size() != d)
    throw ConfigError("semigroup.bump_center must have dimension " + std::to_string(d));
  std::vector<double> center(2 * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) center[i] = g.bump_center[i];
  TestFn f = bump(center, g.bump_radius);
  InvarianceResult r = invariance_residual(c.phi1, c.phi2, *f);
  ConvergenceReport rep;
  rep.title = "invariance";
  rep.columns = {"residual", "abs_integral", "relative"};
  rep.rows.push_back({r.residual, r.abs_integral, r.relative});
  rep.add_check("|integral of L f| <= 1e-6 relative", r.relative <= 1e-6, "relative = " + format_double(r.relative));
  emit_report(c, "invariance", rep);
  return report_checks(c, rep);
}

// Re-plots a report CSV: first column on x, the remaining columns as series.
int cmd_report(const Flags& f, std::ostream& out, std::ostream& err) {
  std::ifstream in(f.input, std::ios::binary);
  if (!in) throw ConfigError("cannot open report '" + f.input + "'");
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    if (header.empty()) {
      header = fields;
      cols.assign(header.size(), {});
      continue;
    }
    for (std::size_t j = 0; j < header.size() && j < fields.size(); ++j) {
      try {
        cols[j].push_back(std::stod(fields[j]));
      } catch (const std::exception&) {
        cols[j].push_back(std::nan(""));
      }
    }
  }
  if (header.size() < 2 || cols[0].empty()) throw ConfigError("'" + f.input + "' is not a numeric report CSV");
  std::vector<PlotSeries> series;
  for (std::size_t j = 1; j < header.size(); ++j) series.push_back({header[j], cols[0], cols[j], {}, {}});
  bool log_x = std::all_of(cols[0].begin(), cols[0].end(), [](double v) { return v > 0; });
  fs::path dst = f.out.empty() ? fs::path(f.input).replace_extension(".svg")
                               : fs::path(f.out) / fs::path(f.input).filename().replace_extension(".svg");
  if (!f.out.empty()) fs::create_directories(f.out);
  try {
    write_file(dst, svg_plot(fs::path(f.input).stem().string(), header[0], "value", series, log_x, log_x));
    out << "wrote " << dst.string() << "\n";
  } catch (const std::exception& e) {
    err << "warning: plot not written: " << e.what() << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification toolkit for generalized stochastic Hamiltonian systems", "gshs"};
  app.require_subcommand(1);
  Flags f;
  std::uint64_t seed = 0;
  std::size_t workers = 0;

  auto common = [&](CLI::App* s, bool with_config = true) {
    if (with_config) s->add_option("--config", f.config, "YAML experiment config")->check(CLI::ExistingFile);
    s->add_option("--seed", seed, "override the config seed");
    s->add_option("--workers", workers, "worker threads (GSHS_WORKERS overrides)");
    s->add_option("--out", f.out, "output directory");
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(Context&);
  };
  const Sub subs[] = {
      {"validate", "check the potential assumptions", cmd_validate},
      {"simulate", "simulate an ensemble and write it to disk", cmd_simulate},
      {"overdamped-limit", "energy distance to the overdamped limit over the eps grid", cmd_overdamped_limit},
      {"semigroup", "embedded norms and generator summands over the eps grid", cmd_semigroup},
      {"martingale", "martingale battery and quadratic variation", cmd_martingale},
      {"tightness", "fourth-moment increment diagnostics", cmd_tightness},
      {"rescaling", "velocity-rescaling equivalence test", cmd_rescaling},
      {"invariance", "integral of the generator against the Gibbs measure", cmd_invariance},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> apps;
  for (const auto& s : subs) {
    CLI::App* a = app.add_subcommand(s.name, s.help);
    common(a);
    a->add_flag("--force", f.force, "run despite stiffness or assumption refusals");
    a->add_flag("--no-compensator", f.no_compensator, "negative control: drop the compensator in martingale tests");
    a->add_flag("--csv", f.csv, "also write the ensemble as CSV");
    apps.emplace_back(a, &s);
  }
  CLI::App* rep = app.add_subcommand("report", "re-plot a report CSV as SVG");
  rep->add_option("--input", f.input, "report CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", f.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  try {
    if (app.got_subcommand(rep)) return cmd_report(f, out, err);
    for (auto& [a, s] : apps) {
      if (!app.got_subcommand(a)) continue;
      if (a->count("--seed")) f.seed = seed;
      if (a->count("--workers")) f.workers = workers;
      Context c = load(f, out, err);
      return s->fn(c);
    }
  } catch (const Exit& e) {
    return e.code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidParameter || e.kind() == ErrorKind::DimensionMismatch ? kConfigError
                                                                                                 : kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace gshs::cli
