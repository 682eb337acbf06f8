#include "gshs/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "gshs/csv.hpp"
#include "gshs/error.hpp"
#include "gshs/rng.hpp"

namespace gshs {

namespace {

[[noreturn]] void bad(const YAML::Node& n, const std::string& what) {
  const auto m = n.Mark();
  if (m.is_null()) throw ConfigError(what);
  throw ConfigError(what, m.line + 1, m.column + 1);
}

void only_keys(const YAML::Node& n, const std::string& where, std::set<std::string> allowed) {
  if (!n.IsMap()) bad(n, where + " must be a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) bad(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& name) {
  if (!n.IsScalar()) bad(n, name + " must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    bad(n, "cannot read " + name + " from '" + n.Scalar() + "'");
  }
}

double real(const YAML::Node& n, const std::string& name) {
  if (n.IsScalar()) {
    const auto& s = n.Scalar();
    if (s == ".inf" || s == "inf") return kInf;
    if (s == "-.inf" || s == "-inf") return -kInf;
  }
  return scalar<double>(n, name);
}

std::size_t count(const YAML::Node& n, const std::string& name) {
  const auto v = scalar<long long>(n, name);
  if (v < 0) bad(n, name + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<double> reals(const YAML::Node& n, const std::string& name) {
  if (!n.IsSequence()) bad(n, name + " must be a list");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(real(e, name));
  return out;
}

template <class F>
void opt(const YAML::Node& m, const char* key, F&& f) {
  if (auto n = m[key]) f(n);
}

PotentialDecl parse_potential(const YAML::Node& n, const std::string& where) {
  only_keys(n, where, {"kind", "dim", "params", "expr", "symmetric", "singular_at_origin"});
  PotentialDecl d;
  if (!n["kind"]) bad(n, where + " needs a kind");
  d.kind = scalar<std::string>(n["kind"], where + ".kind");
  opt(n, "dim", [&](auto v) { d.dim = count(v, where + ".dim"); });
  opt(n, "expr", [&](auto v) { d.expr = scalar<std::string>(v, where + ".expr"); });
  opt(n, "symmetric", [&](auto v) { d.symmetric = scalar<bool>(v, where + ".symmetric"); });
  opt(n, "singular_at_origin", [&](auto v) { d.singular_at_origin = scalar<bool>(v, where + ".singular_at_origin"); });
  opt(n, "params", [&](auto v) {
    if (!v.IsMap()) bad(v, where + ".params must be a mapping");
    for (const auto& kv : v) d.params[kv.first.template as<std::string>()] = real(kv.second, where + ".params");
  });
  // Resolve now so unknown kinds and parameters fail at parse time.
  try {
    (void)make_potential(d);
  } catch (const Error& e) {
    bad(n["kind"], where + ": " + e.what());
  }
  return d;
}

ExperimentConfig from_node(const YAML::Node& root) {
  ExperimentConfig c;
  if (root.IsNull()) return c;
  only_keys(root, "config",
            {"seed", "workers", "output", "potentials", "eps_grid", "sde", "initial", "statistics", "semigroup"});
  opt(root, "seed", [&](auto v) { c.seed = scalar<std::uint64_t>(v, "seed"); });
  opt(root, "workers", [&](auto v) { c.workers = count(v, "workers"); });
  opt(root, "output", [&](auto v) { c.output = scalar<std::string>(v, "output"); });
  if (auto p = root["potentials"]) {
    only_keys(p, "potentials", {"phi1", "phi2"});
    if (!p["phi1"] || !p["phi2"]) bad(p, "potentials needs phi1 and phi2");
    c.phi1 = parse_potential(p["phi1"], "phi1");
    c.phi2 = parse_potential(p["phi2"], "phi2");
    if (c.phi1.dim != c.phi2.dim) bad(p, "phi1 and phi2 must have the same dimension");
  }
  opt(root, "eps_grid", [&](auto v) {
    c.eps_grid = reals(v, "eps_grid");
    for (double e : c.eps_grid)
      if (!(e > 0 && e <= 1)) bad(v, "eps_grid entries must lie in (0, 1]");
  });
  if (auto s = root["sde"]) {
    only_keys(s, "sde", {"eps", "t_end", "dt", "scheme", "n_paths", "guard", "guard_distance", "record_stride",
                         "noise_dt"});
    auto& q = c.sde;
    opt(s, "eps", [&](auto v) { q.eps = real(v, "sde.eps"); });
    opt(s, "t_end", [&](auto v) { q.t_end = real(v, "sde.t_end"); });
    opt(s, "dt", [&](auto v) { q.dt = real(v, "sde.dt"); });
    opt(s, "n_paths", [&](auto v) { q.n_paths = count(v, "sde.n_paths"); });
    opt(s, "guard_distance", [&](auto v) { q.guard_distance = real(v, "sde.guard_distance"); });
    opt(s, "record_stride", [&](auto v) { q.record_stride = count(v, "sde.record_stride"); });
    opt(s, "noise_dt", [&](auto v) { q.noise_dt = real(v, "sde.noise_dt"); });
    opt(s, "scheme", [&](auto v) {
      try {
        q.scheme = parse_scheme(scalar<std::string>(v, "sde.scheme"));
      } catch (const Error& e) {
        bad(v, e.what());
      }
    });
    opt(s, "guard", [&](auto v) {
      try {
        q.guard = parse_guard(scalar<std::string>(v, "sde.guard"));
      } catch (const Error& e) {
        bad(v, e.what());
      }
    });
    try {
      validate_sde_config(q);
    } catch (const Error& e) {
      bad(s, std::string("sde: ") + e.what());
    }
  }
  if (auto i = root["initial"]) {
    only_keys(i, "initial", {"kind", "lo", "hi", "center", "radius"});
    auto& d = c.initial;
    opt(i, "kind", [&](auto v) { d.kind = scalar<std::string>(v, "initial.kind"); });
    if (d.kind != "stationary" && d.kind != "interval" && d.kind != "bump")
      bad(i["kind"], "initial.kind must be stationary, interval or bump");
    opt(i, "lo", [&](auto v) { d.lo = real(v, "initial.lo"); });
    opt(i, "hi", [&](auto v) { d.hi = real(v, "initial.hi"); });
    opt(i, "center", [&](auto v) { d.center = reals(v, "initial.center"); });
    opt(i, "radius", [&](auto v) { d.radius = real(v, "initial.radius"); });
  }
  if (auto s = root["statistics"]) {
    only_keys(s, "statistics", {"permutations", "times", "pairs", "n_paths", "battery_paths", "record_dt",
                                "reference_dt", "lags"});
    auto& d = c.statistics;
    opt(s, "permutations", [&](auto v) { d.permutations = count(v, "statistics.permutations"); });
    opt(s, "times", [&](auto v) { d.times = reals(v, "statistics.times"); });
    opt(s, "n_paths", [&](auto v) { d.n_paths = count(v, "statistics.n_paths"); });
    opt(s, "battery_paths", [&](auto v) { d.battery_paths = count(v, "statistics.battery_paths"); });
    opt(s, "record_dt", [&](auto v) { d.record_dt = real(v, "statistics.record_dt"); });
    opt(s, "reference_dt", [&](auto v) { d.reference_dt = real(v, "statistics.reference_dt"); });
    opt(s, "lags", [&](auto v) { d.lags = reals(v, "statistics.lags"); });
    opt(s, "pairs", [&](auto v) {
      if (!v.IsSequence()) bad(v, "statistics.pairs must be a list of [s, t]");
      d.pairs.clear();
      for (const auto& e : v) {
        auto st = reals(e, "statistics.pairs");
        if (st.size() != 2 || !(st[1] > st[0])) bad(e, "each pair must be [s, t] with s < t");
        d.pairs.emplace_back(st[0], st[1]);
      }
    });
  }
  if (auto s = root["semigroup"]) {
    only_keys(s, "semigroup", {"bump_center", "bump_radius", "rel_tol"});
    auto& d = c.semigroup;
    opt(s, "bump_center", [&](auto v) { d.bump_center = reals(v, "semigroup.bump_center"); });
    opt(s, "bump_radius", [&](auto v) { d.bump_radius = real(v, "semigroup.bump_radius"); });
    opt(s, "rel_tol", [&](auto v) { d.rel_tol = real(v, "semigroup.rel_tol"); });
  }
  c.sde.seed = c.seed;
  c.sde.workers = c.workers;
  return c;
}

std::string quoted(const std::string& s) {
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') o += '\\';
    o += ch;
  }
  return o + '"';
}

std::string num(double v) {
  if (v == kInf) return ".inf";
  if (v == -kInf) return "-.inf";
  return format_double(v);
}

std::string list(const std::vector<double>& v) {
  std::string o = "[";
  for (std::size_t i = 0; i < v.size(); ++i) o += (i ? ", " : "") + num(v[i]);
  return o + "]";
}

void emit_potential(std::ostringstream& o, const char* name, const PotentialDecl& d) {
  o << "  " << name << ":\n";
  o << "    kind: " << quoted(d.kind) << "\n";
  o << "    dim: " << d.dim << "\n";
  if (!d.params.empty()) {
    o << "    params:\n";
    for (const auto& [k, v] : d.params) o << "      " << quoted(k) << ": " << num(v) << "\n";
  }
  if (!d.expr.empty()) o << "    expr: " << quoted(d.expr) << "\n";
  if (d.symmetric) o << "    symmetric: true\n";
  if (d.singular_at_origin) o << "    singular_at_origin: true\n";
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  return from_node(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "seed: " << c.seed << "\n";
  o << "workers: " << c.workers << "\n";
  o << "output: " << quoted(c.output) << "\n";
  o << "potentials:\n";
  emit_potential(o, "phi1", c.phi1);
  emit_potential(o, "phi2", c.phi2);
  o << "eps_grid: " << list(c.eps_grid) << "\n";
  const auto& s = c.sde;
  o << "sde:\n";
  o << "  eps: " << num(s.eps) << "\n";
  o << "  t_end: " << num(s.t_end) << "\n";
  o << "  dt: " << num(s.dt) << "\n";
  o << "  scheme: " << to_string(s.scheme) << "\n";
  o << "  n_paths: " << s.n_paths << "\n";
  o << "  guard: " << to_string(s.guard) << "\n";
  o << "  guard_distance: " << num(s.guard_distance) << "\n";
  o << "  record_stride: " << s.record_stride << "\n";
  o << "  noise_dt: " << num(s.noise_dt) << "\n";
  const auto& i = c.initial;
  o << "initial:\n";
  o << "  kind: " << i.kind << "\n";
  o << "  lo: " << num(i.lo) << "\n";
  o << "  hi: " << num(i.hi) << "\n";
  o << "  center: " << list(i.center) << "\n";
  o << "  radius: " << num(i.radius) << "\n";
  const auto& t = c.statistics;
  o << "statistics:\n";
  o << "  permutations: " << t.permutations << "\n";
  o << "  times: " << list(t.times) << "\n";
  o << "  pairs: [";
  for (std::size_t k = 0; k < t.pairs.size(); ++k)
    o << (k ? ", " : "") << list({t.pairs[k].first, t.pairs[k].second});
  o << "]\n";
  o << "  n_paths: " << t.n_paths << "\n";
  o << "  battery_paths: " << t.battery_paths << "\n";
  o << "  record_dt: " << num(t.record_dt) << "\n";
  o << "  reference_dt: " << num(t.reference_dt) << "\n";
  o << "  lags: " << list(t.lags) << "\n";
  const auto& g = c.semigroup;
  o << "semigroup:\n";
  o << "  bump_center: " << list(g.bump_center) << "\n";
  o << "  bump_radius: " << num(g.bump_radius) << "\n";
  o << "  rel_tol: " << num(g.rel_tol) << "\n";
  return o.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.workers = 0;
  c.sde.workers = 0;
  c.output.clear();
  return fnv1a(emit_config(c));
}

}  // namespace gshs
