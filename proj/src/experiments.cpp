#include "gshs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gshs/error.hpp"
#include "gshs/rng.hpp"

namespace gshs {

InitialDistribution make_initial(const InitialDecl& decl, GibbsMeasure base) {
  if (decl.kind == "stationary") return InitialDistribution::stationary(std::move(base));
  if (decl.kind == "interval") return InitialDistribution::position_interval(std::move(base), decl.lo, decl.hi);
  if (decl.kind == "bump") return InitialDistribution::position_bump(std::move(base), decl.center, decl.radius);
  fail(ErrorKind::InvalidParameter, "unknown initial density kind '" + decl.kind + "'");
}

double dyadic_step(double eps) {
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  double dt = 0.01;
  const double limit = eps * eps / 10.0;
  while (dt > limit * (1.0 + 1e-12)) dt *= 0.5;
  return dt;
}

namespace {

std::size_t stride_for(double record_dt, double dt) {
  const double r = record_dt / dt;
  const auto k = static_cast<std::size_t>(std::llround(r));
  require(k >= 1 && std::abs(r - static_cast<double>(k)) <= 1e-9 * r, ErrorKind::InvalidParameter,
          "record spacing must be a multiple of the step");
  return k;
}

void require_on_grid(const std::vector<double>& times, double record_dt, double t_end) {
  require(!times.empty(), ErrorKind::InvalidParameter, "need at least one f.d.d. time");
  for (double t : times) {
    const double r = t / record_dt;
    require(t > 0 && t <= t_end + 1e-12 && std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r),
            ErrorKind::InvalidParameter, "f.d.d. time " + std::to_string(t) + " is not on the recorded grid");
  }
}

std::vector<double> sorted_desc(std::vector<double> v) {
  require(!v.empty(), ErrorKind::InvalidParameter, "empty eps grid");
  for (double e : v) require(e > 0, ErrorKind::InvalidParameter, "eps must be positive");
  std::sort(v.begin(), v.end(), std::greater<>());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

PathEnsemble first_paths(const PathEnsemble& ens, std::size_t n) {
  if (n >= ens.n_paths) return ens;
  PathEnsemble out = ens;
  out.n_paths = n;
  out.states.resize(n * ens.grid() * ens.state_dim());
  return out;
}

// Exact f.d.d. of dX = -k X dt + sqrt 2 dB started from the given positions.
FddSample ou_reference(double k, std::span<const double> x0, std::size_t d, const std::vector<double>& times,
                       std::uint64_t seed) {
  const std::size_t n = x0.size() / d;
  const std::size_t dim = d * times.size();
  std::vector<double> data(n * dim);
  for (std::size_t p = 0; p < n; ++p) {
    Rng rng(seed, p);
    double t_prev = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double h = times[j] - t_prev;
      const double a = std::exp(-k * h);
      const double s = std::sqrt(-std::expm1(-2.0 * k * h) / k);
      for (std::size_t i = 0; i < d; ++i) {
        const double prev = j == 0 ? x0[p * d + i] : data[p * dim + (j - 1) * d + i];
        data[p * dim + j * d + i] = a * prev + s * rng.normal();
      }
      t_prev = times[j];
    }
  }
  return make_fdd(times, dim, std::move(data), "analytic OU");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

ConvergenceReport overdamped_limit_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                              const LimitOptions& opts) {
  require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch, "Phi1 and Phi2 dimensions differ");
  const std::size_t d = phi1.dim();
  const auto grid = sorted_desc(opts.eps_grid);
  auto times = opts.times;
  std::sort(times.begin(), times.end());
  const double t_end = times.back();
  require_on_grid(times, opts.record_dt, t_end);

  ConvergenceReport rep;
  rep.title = "overdamped limit";
  rep.columns = {"eps", "dt", "energy_distance", "p_value", "max_abs_z"};

  // One initial sample (x, v ~ mu_{Phi2}) shared by every eps.
  InitialDistribution init = make_initial(opts.initial, GibbsMeasure::joint(phi1, phi2));
  if (!init.h_sup())
    rep.notes.push_back("h is not certified bounded, so sup_eps ||h_eps||_{L2} is not verified");
  SamplerOptions so;
  so.workers = opts.workers;
  const auto z0 = sample(init, opts.n_paths, derive_seed(opts.seed, "initial"), so);

  // Reference f.d.d. from an independent initial sample.
  InitialDistribution init_x = make_initial(opts.initial, GibbsMeasure::position(phi1));
  const auto x0 = sample(init_x, opts.n_paths, derive_seed(opts.seed, "reference-initial"), so);
  FddSample ref;
  if (auto k = phi1.quadratic_stiffness()) {
    ref = ou_reference(*k, x0, d, times, derive_seed(opts.seed, "reference"));
    rep.notes.push_back("reference: exact OU transition law");
  } else {
    SdeConfig rc;
    rc.eps = 1.0;
    rc.t_end = t_end;
    rc.dt = opts.reference_dt;
    rc.scheme = Scheme::EulerMaruyama;
    rc.n_paths = opts.n_paths;
    rc.seed = derive_seed(opts.seed, "reference");
    rc.record_stride = stride_for(opts.record_dt, opts.reference_dt);
    rc.workers = opts.workers;
    rc.enforce_stiffness = false;
    PathEnsemble r = simulate_overdamped(phi1, x0, rc, "reference " + init.label());
    ref = position_fdd(r, times, "overdamped Euler-Maruyama");
    rep.notes.push_back("reference: overdamped Euler-Maruyama ensemble, dt = " + fmt(opts.reference_dt));
  }

  double noise_dt = kInf;
  for (double e : grid) noise_dt = std::min(noise_dt, dyadic_step(e));

  std::vector<std::pair<double, double>> pairs;
  if (times.size() >= 2)
    pairs.emplace_back(times.front(), times.back());
  else
    pairs.emplace_back(0.5 * times.front(), times.front());

  EnergyOptions eo;
  eo.permutations = opts.permutations;
  eo.seed = derive_seed(opts.seed, "energy");
  eo.workers = opts.workers;

  double worst_z = 0.0;
  for (double eps : grid) {
    SdeConfig cfg;
    cfg.eps = eps;
    cfg.t_end = t_end;
    cfg.dt = dyadic_step(eps);
    cfg.scheme = Scheme::Splitting;
    cfg.n_paths = opts.n_paths;
    cfg.seed = derive_seed(opts.seed, "noise");
    cfg.record_stride = stride_for(opts.record_dt, cfg.dt);
    cfg.noise_dt = noise_dt;
    cfg.workers = opts.workers;
    PathEnsemble ens = simulate_gshs(phi1, phi2, z0, cfg, init.label() + " with v ~ mu_Phi2");
    if (ens.guard.unrecovered > 0)
      rep.notes.push_back("eps = " + fmt(eps) + ": " + std::to_string(ens.guard.unrecovered) +
                          " unrecovered guard violations");
    const EnergyResult er = energy_distance(position_fdd(ens, times), ref, eo);

    std::vector<double> a(2 * d, 0.0);
    a[0] = 1.0;
    a[d] = eps;
    TestFn F = affine(a);
    MartingaleOptions mo;
    mo.include_compensator = !opts.no_compensator;
    mo.workers = opts.workers;
    PathEnsemble sub = first_paths(ens, opts.battery_paths);
    PathSeries M = martingale_process(sub, *F, gshs_generator(phi1, phi2, eps), mo);
    const double z = max_abs_z(martingale_zscores(M, sub, pairs, default_weights(true)));
    worst_z = std::max(worst_z, z);
    rep.rows.push_back({eps, cfg.dt, er.statistic, er.p_value, z});
  }

  const auto dist = rep.column("energy_distance");
  if (grid.size() < 2) {
    rep.skip_check("distance strictly decreasing in eps", "eps grid has a single entry");
    rep.notes.push_back("monotonicity check skipped: eps grid has length 1");
  } else {
    bool dec = true;
    for (std::size_t i = 1; i < dist.size(); ++i) dec = dec && dist[i] < dist[i - 1];
    std::string detail;
    for (double v : dist) detail += (detail.empty() ? "" : " > ") + fmt(v);
    rep.add_check("distance strictly decreasing in eps", dec, detail);
  }
  const double p_min = rep.rows.back()[3];
  rep.add_check("p > 0.01 at smallest eps", p_min > 0.01, "eps = " + fmt(grid.back()) + ", p = " + fmt(p_min));
  rep.add_check("martingale battery |z| <= 3", worst_z <= 3.0,
                std::string(opts.no_compensator ? "compensator dropped (negative control), " : "") +
                    "max |z| = " + fmt(worst_z));
  return rep;
}

MartingaleExperimentResult martingale_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                                 const MartingaleExperimentOptions& opts) {
  require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch, "Phi1 and Phi2 dimensions differ");
  const std::size_t d = phi1.dim();
  const double eps = opts.eps;
  const PotentialSpec phi2e = scale_velocity_potential(phi2, eps);
  const GeneratorSpec gen = gshs_generator(phi1, phi2e, 1.0);
  InitialDistribution init = InitialDistribution::stationary(GibbsMeasure::joint(phi1, phi2));

  SdeConfig cfg;
  cfg.eps = eps;
  cfg.t_end = opts.t_end;
  cfg.dt = opts.dt;
  cfg.n_paths = opts.n_paths;
  cfg.seed = opts.seed;
  cfg.record_stride = stride_for(opts.record_dt, opts.dt);
  cfg.workers = opts.workers;
  PathEnsemble r = to_scaled_kinetic_frame(simulate_gshs(phi1, phi2, init, cfg), eps);

  MartingaleOptions with;
  with.workers = opts.workers;
  MartingaleOptions battery = with;
  battery.include_compensator = !opts.no_compensator;

  MartingaleExperimentResult res;
  ConvergenceReport& rep = res.report;
  rep.title = "martingale structure";

  TestFn g1 = coordinate_g(d, 0), f1 = coordinate_f(d, 0);
  for (auto [name, fn] : {std::pair<std::string, TestFn>{"g_1", g1}, {"f_1", f1}}) {
    PathSeries M = martingale_process(r, *fn, gen, battery);
    for (auto& z : martingale_zscores(M, r, opts.pairs, default_weights(true))) {
      res.zscores.push_back(z);
      res.zscore_functions.push_back(name);
    }
  }
  const double zmax = max_abs_z(res.zscores);
  rep.add_check("martingale battery |z| <= 3", zmax <= 3.0,
                std::string(opts.no_compensator ? "compensator dropped (negative control), " : "") +
                    "max |z| = " + fmt(zmax));

  PathSeries Mg = martingale_process(r, *g1, gen, with);
  PathSeries Qg = quadratic_compensator(r, *g1, gen, with);
  QvCurve qv = empirical_quadratic_variation(Mg, &Qg);
  for (auto& w : qv.warnings) rep.notes.push_back(w);
  const double target = 2.0 * opts.t_end;
  rep.add_check("QV(T) of M^[g_1] = 2T within 5%", std::abs(qv.qv.back() - target) <= 0.05 * target,
                "QV(T) = " + fmt(qv.qv.back()) + ", 2T = " + fmt(target));
  rep.add_check("QV tracks compensator within 5% of compensator(T)",
                qv.max_gap <= 0.05 * qv.compensator.back(), "max gap = " + fmt(qv.max_gap));

  rep.columns = {"t", "qv_g1", "qv_lo", "qv_hi", "compensator_g1"};
  QvCurve cv;
  if (d >= 2) {
    PathSeries Mg2 = martingale_process(r, *coordinate_g(d, 1), gen, with);
    cv = empirical_cross_variation(Mg, Mg2);
    rep.columns.push_back("cross_g1g2");
    rep.add_check("cross-variation <M^[g_1], M^[g_2]>_T within 5% of 2T", std::abs(cv.qv.back()) <= 0.05 * target,
                  "cross(T) = " + fmt(cv.qv.back()));
  }
  for (std::size_t k = 0; k < qv.times.size(); ++k) {
    std::vector<double> row{qv.times[k], qv.qv[k], qv.lo[k], qv.hi[k], qv.compensator[k]};
    if (d >= 2) row.push_back(cv.qv[k]);
    rep.rows.push_back(std::move(row));
  }

  // M^[f_1 - g_1] on a run recorded at every step.
  SdeConfig fine = cfg;
  fine.dt = std::min(opts.identity_dt, opts.dt);
  fine.n_paths = std::min(opts.identity_paths, opts.n_paths);
  fine.record_stride = 1;
  fine.seed = derive_seed(opts.seed, "identity");
  PathEnsemble rf = to_scaled_kinetic_frame(simulate_gshs(phi1, phi2, init, fine), eps);
  TestFn diff = linear_combination({1.0, -1.0}, {f1, g1});
  PathSeries Md = martingale_process(rf, *diff, gen, with);
  double mmax = 0.0;
  for (double v : Md.values) mmax = std::max(mmax, std::abs(v));
  rep.add_check("M^[f_1 - g_1] = 0 within 1e-6", mmax <= 1e-6,
                "max |M| = " + fmt(mmax) + " over " + std::to_string(fine.n_paths) + " paths, dt = " + fmt(fine.dt));
  return res;
}

ConvergenceReport tightness_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                       const TightnessOptions& opts) {
  require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch, "Phi1 and Phi2 dimensions differ");
  const auto grid = sorted_desc(opts.eps_grid);
  ConvergenceReport rep;
  rep.title = "tightness diagnostics";
  rep.columns = {"eps", "dt", "exponent_f1", "constant_f1", "exponent_g1", "constant_g1", "drift_ratio_max"};
  InitialDistribution init = InitialDistribution::stationary(GibbsMeasure::joint(phi1, phi2));
  bool drift_ok = true, exp_ok = true;
  for (double eps : grid) {
    SdeConfig cfg;
    cfg.eps = eps;
    cfg.t_end = opts.t_end;
    cfg.dt = dyadic_step(eps);
    cfg.n_paths = opts.n_paths;
    cfg.seed = derive_seed(opts.seed, "tightness");
    cfg.workers = opts.workers;
    PathEnsemble ens = simulate_gshs(phi1, phi2, init, cfg);
    auto inc_f = increment_moment_diagnostic(ens, phi1, phi2, CoordinateTransform::F, 0, opts.lags);
    auto inc_g = increment_moment_diagnostic(ens, phi1, phi2, CoordinateTransform::G, 0, opts.lags);
    auto drift = drift_bound_diagnostic(ens, phi1, phi2, 0, opts.lags);
    double ratio = 0.0;
    for (const auto& row : drift) {
      ratio = std::max(ratio, row.lhs / row.rhs);
      drift_ok = drift_ok && row.ok;
    }
    exp_ok = exp_ok && inc_f.exponent >= 1.8 && inc_g.exponent >= 1.8;
    rep.rows.push_back({eps, cfg.dt, inc_f.exponent, inc_f.constant, inc_g.exponent, inc_g.constant, ratio});
  }
  auto spread = [&](const std::string& col) {
    auto c = rep.column(col);
    return *std::max_element(c.begin(), c.end()) / *std::min_element(c.begin(), c.end());
  };
  double min_exp = kInf;
  for (const auto& row : rep.rows) min_exp = std::min({min_exp, row[2], row[4]});
  rep.add_check("fourth-moment exponent >= 1.8", exp_ok, "min exponent = " + fmt(min_exp));
  const double sf = spread("constant_f1"), sg = spread("constant_g1");
  rep.add_check("constant for M^[f_1] eps-uniform (max/min <= 3)", sf <= 3.0, "max/min = " + fmt(sf));
  rep.add_check("constant for M^[g_1] eps-uniform (max/min <= 3)", sg <= 3.0, "max/min = " + fmt(sg));
  rep.add_check("drift second moment <= lag^2 E|d_1 Phi1|^2", drift_ok,
                "3 standard errors allowed; max lhs/rhs listed per eps");
  return rep;
}

ConvergenceReport rescaling_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                       const RescalingOptions& opts) {
  require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch, "Phi1 and Phi2 dimensions differ");
  const auto grid = sorted_desc(opts.eps_grid);
  auto times = opts.times;
  std::sort(times.begin(), times.end());
  require_on_grid(times, opts.record_dt, times.back());
  ConvergenceReport rep;
  rep.title = "unitary equivalence";
  rep.columns = {"eps", "energy_distance", "p_value", "v2_mapped", "v2_direct"};
  EnergyOptions eo;
  eo.permutations = opts.permutations;
  eo.seed = derive_seed(opts.seed, "energy");
  eo.workers = opts.workers;
  for (double eps : grid) {
    SdeConfig cfg;
    cfg.t_end = times.back();
    cfg.dt = dyadic_step(eps);
    cfg.n_paths = opts.n_paths;
    cfg.record_stride = stride_for(opts.record_dt, cfg.dt);
    cfg.workers = opts.workers;

    const PotentialSpec phi2e = scale_velocity_potential(phi2, eps);
    SdeConfig ca = cfg;
    ca.eps = 1.0;
    ca.seed = derive_seed(opts.seed, "scaled-kinetic");
    PathEnsemble a = rescale_ensemble(
        simulate_gshs(phi1, phi2e, InitialDistribution::stationary(GibbsMeasure::joint(phi1, phi2e)), ca), eps);

    SdeConfig cb = cfg;
    cb.eps = eps;
    cb.seed = derive_seed(opts.seed, "direct");
    PathEnsemble b = simulate_gshs(phi1, phi2, InitialDistribution::stationary(GibbsMeasure::joint(phi1, phi2)), cb);

    const EnergyResult er = energy_distance(position_fdd(a, times), position_fdd(b, times), eo);
    auto v2 = [&](const PathEnsemble& e, double& se) {
      const std::size_t k = e.grid() - 1;
      double s = 0.0, s2 = 0.0;
      for (std::size_t p = 0; p < e.n_paths; ++p) {
        const double v = e.v(p, k) * e.v(p, k);
        s += v;
        s2 += v * v;
      }
      const double n = static_cast<double>(e.n_paths);
      const double m = s / n;
      se = std::sqrt(std::max(0.0, s2 / n - m * m) / n);
      return m;
    };
    double sa = 0.0, sb = 0.0;
    const double ma = v2(a, sa), mb = v2(b, sb);
    rep.rows.push_back({eps, er.statistic, er.p_value, ma, mb});
    rep.add_check("eps = " + fmt(eps) + ": position f.d.d. not rejected (p > 0.01)", er.p_value > 0.01,
                  "p = " + fmt(er.p_value));
    rep.add_check("eps = " + fmt(eps) + ": E V_T^2 agrees within 4 standard errors",
                  std::abs(ma - mb) <= 4.0 * std::hypot(sa, sb), fmt(ma) + " vs " + fmt(mb));
  }
  return rep;
}

}  // namespace gshs
