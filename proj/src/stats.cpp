#include "gshs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gshs/error.hpp"
#include "gshs/measures.hpp"

namespace gshs {

double PathMetricConfig::operator()(std::span<const double> a, std::span<const double> b) const {
  require(a.size() == 2 * d && b.size() == 2 * d, ErrorKind::DimensionMismatch, "metric expects points of R^{2d}");
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    s += std::abs((a[i] + a[d + i]) - (b[i] + b[d + i]));
    s += std::abs(a[d + i] - b[d + i]);
  }
  return s;
}

std::vector<MartingaleWeight> default_weights(bool has_velocity) {
  std::vector<MartingaleWeight> w;
  w.push_back({"1", [](std::span<const double>, double) { return 1.0; }});
  w.push_back({"tanh(X_s)", [](std::span<const double> z, double) { return std::tanh(z[0]); }});
  if (has_velocity) {
    w.push_back({"tanh(V_s)", [](std::span<const double> z, double) { return std::tanh(z[z.size() / 2]); }});
  }
  w.push_back({"tanh(M_s)", [](std::span<const double>, double m) { return std::tanh(m); }});
  return w;
}

namespace {

std::size_t series_index(const PathSeries& M, double t) {
  for (std::size_t k = 0; k < M.times.size(); ++k)
    if (std::abs(M.times[k] - t) <= 1e-9 * (1.0 + std::abs(t))) return k;
  fail(ErrorKind::InvalidInput, "time " + std::to_string(t) + " is not on the recorded grid");
}

double variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (n - 1.0);
}

}  // namespace

std::vector<ZScore> martingale_zscores(const PathSeries& M, const PathEnsemble& paths,
                                       const std::vector<std::pair<double, double>>& pairs,
                                       const std::vector<MartingaleWeight>& weights) {
  require(M.n_paths == paths.n_paths && M.grid() == paths.grid(), ErrorKind::DimensionMismatch,
          "martingale series and ensemble differ in shape");
  require(M.n_paths >= 1000, ErrorKind::InvalidParameter, "martingale battery needs at least 1000 paths");
  const std::size_t n = M.n_paths;
  std::vector<ZScore> out;
  for (auto [s, t] : pairs) {
    require(t > s, ErrorKind::InvalidParameter, "battery pairs need s < t");
    const std::size_t ks = series_index(M, s), kt = series_index(M, t);
    for (const auto& w : weights) {
      ZScore z;
      z.s = s;
      z.t = t;
      z.weight = w.name;
      std::vector<double> ws(n), prod(n);
      for (std::size_t p = 0; p < n; ++p) {
        ws[p] = w.fn(paths.state(p, ks), M.at(p, ks));
        prod[p] = ws[p] * (M.at(p, kt) - M.at(p, ks));
      }
      const bool constant_weight = w.name == "1";
      if (!constant_weight && variance(ws) == 0.0) {
        z.skipped = true;
        z.note = "degenerate weight (zero variance)";
        out.push_back(z);
        continue;
      }
      const double mean = std::accumulate(prod.begin(), prod.end(), 0.0) / static_cast<double>(n);
      const double var = variance(prod);
      if (var == 0.0) {
        z.z = 0.0;
        z.note = mean == 0.0 ? "increments identically zero" : "zero-variance increments";
        if (mean != 0.0) z.z = mean > 0 ? kInf : -kInf;
      } else {
        z.z = mean / std::sqrt(var / static_cast<double>(n));
      }
      out.push_back(z);
    }
  }
  return out;
}

double max_abs_z(const std::vector<ZScore>& zs) {
  double m = 0.0;
  for (const auto& z : zs)
    if (!z.skipped) m = std::max(m, std::abs(z.z));
  return m;
}

namespace {

QvCurve covariation(const PathSeries& A, const PathSeries& B) {
  require(A.n_paths == B.n_paths && A.grid() == B.grid(), ErrorKind::DimensionMismatch,
          "martingale series differ in shape");
  const std::size_t n = A.n_paths, G = A.grid();
  QvCurve q;
  q.times = A.times;
  q.qv.assign(G, 0.0);
  q.lo.assign(G, 0.0);
  q.hi.assign(G, 0.0);
  std::vector<double> run(n, 0.0);
  for (std::size_t k = 1; k < G; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      run[p] += (A.at(p, k) - A.at(p, k - 1)) * (B.at(p, k) - B.at(p, k - 1));
      s += run[p];
      s2 += run[p] * run[p];
    }
    const double m = s / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (s2 - s * m) / static_cast<double>(n - 1)) : 0.0;
    const double se = std::sqrt(var / static_cast<double>(n));
    q.qv[k] = m;
    q.lo[k] = m - 3.0 * se;
    q.hi[k] = m + 3.0 * se;
  }
  double max_dt = 0.0;
  for (std::size_t k = 1; k < G; ++k) max_dt = std::max(max_dt, q.times[k] - q.times[k - 1]);
  if (max_dt > 1e-2 + 1e-12)
    q.warnings.push_back("resolution warning: recorded dt exceeds 1e-2");
  return q;
}

}  // namespace

QvCurve empirical_quadratic_variation(const PathSeries& M, const PathSeries* compensator) {
  QvCurve q = covariation(M, M);
  if (compensator) {
    require(compensator->n_paths == M.n_paths && compensator->grid() == M.grid(), ErrorKind::DimensionMismatch,
            "compensator and martingale differ in shape");
    q.compensator.assign(M.grid(), 0.0);
    for (std::size_t k = 0; k < M.grid(); ++k) {
      double s = 0.0;
      for (std::size_t p = 0; p < M.n_paths; ++p) s += compensator->at(p, k);
      q.compensator[k] = s / static_cast<double>(M.n_paths);
      q.max_gap = std::max(q.max_gap, std::abs(q.qv[k] - q.compensator[k]));
    }
    for (const auto& w : compensator->warnings) q.warnings.push_back(w);
  }
  return q;
}

QvCurve empirical_cross_variation(const PathSeries& M1, const PathSeries& M2) { return covariation(M1, M2); }

PathEnsemble rescale_ensemble(const PathEnsemble& paths, double eps) {
  require(paths.has_velocity, ErrorKind::InvalidInput, "rescaling needs phase-space paths");
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  PathEnsemble out = paths;
  const std::size_t d = paths.d, sd = paths.state_dim();
  for (std::size_t i = 0; i < out.states.size(); i += sd)
    for (std::size_t j = 0; j < d; ++j) out.states[i + d + j] /= eps;
  out.init_label = paths.init_label + " rescaled v/eps";
  out.phi2_id = paths.phi2_id + " (velocities rescaled by 1/" + std::to_string(eps) + ")";
  return out;
}

// (x, v) -> (x, eps v): paths of the eps-scaled equation become paths of the
// eps = 1 equation with kinetic potential Phi2^eps (inverse of rescale_ensemble).
PathEnsemble to_scaled_kinetic_frame(const PathEnsemble& paths, double eps) {
  require(paths.has_velocity, ErrorKind::InvalidInput, "rescaling needs phase-space paths");
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  PathEnsemble out = paths;
  const std::size_t d = paths.d, sd = paths.state_dim();
  for (std::size_t i = 0; i < out.states.size(); i += sd)
    for (std::size_t j = 0; j < d; ++j) out.states[i + d + j] *= eps;
  return out;
}

namespace {

// Martingale of f_i or g_i in the scaled-kinetic frame under the eps = 1 generator of (Phi1, Phi2^eps).
PathSeries rescaled_martingale(const PathEnsemble& paths, const PotentialSpec& phi1, const PotentialSpec& phi2,
                               CoordinateTransform tr, std::size_t coord, PathSeries* comp) {
  require(paths.has_velocity, ErrorKind::InvalidInput, "diagnostic needs phase-space paths");
  require(coord < paths.d, ErrorKind::InvalidParameter, "coordinate index out of range");
  const double eps = paths.config.eps;
  PathEnsemble r = to_scaled_kinetic_frame(paths, eps);
  GeneratorSpec gen = gshs_generator(phi1, scale_velocity_potential(phi2, eps), 1.0);
  TestFn f = tr == CoordinateTransform::F ? coordinate_f(paths.d, coord) : coordinate_g(paths.d, coord);
  MartingaleOptions mo;
  if (comp) *comp = compensator(r, *f, gen, mo);
  return martingale_process(r, *f, gen, mo);
}

std::size_t lag_steps(const std::vector<double>& times, double lag) {
  const double dt = times[1] - times[0];
  double r = lag / dt;
  std::size_t k = static_cast<std::size_t>(std::llround(r));
  require(k >= 1 && std::abs(r - static_cast<double>(k)) <= 1e-6 * r, ErrorKind::InvalidParameter,
          "lag is not a multiple of the recorded step");
  require(k < times.size(), ErrorKind::InvalidParameter, "lag exceeds the recorded horizon");
  return k;
}

}  // namespace

IncrementDiagnostic increment_moment_diagnostic(const PathEnsemble& paths, const PotentialSpec& phi1,
                                                const PotentialSpec& phi2, CoordinateTransform tr,
                                                std::size_t coord, const std::vector<double>& lags, int order) {
  require(lags.size() >= 2, ErrorKind::InvalidParameter, "need at least two lags for the fit");
  require(paths.n_paths >= 100, ErrorKind::InvalidParameter, "insufficient paths for the increment diagnostic");
  PathSeries M = rescaled_martingale(paths, phi1, phi2, tr, coord, nullptr);
  IncrementDiagnostic out;
  out.lags = lags;
  const std::size_t G = M.grid();
  std::vector<double> lx, ly;
  for (double lag : lags) {
    const std::size_t k = lag_steps(M.times, lag);
    // Non-overlapping windows along each path, pooled over paths.
    double s = 0.0;
    std::size_t cnt = 0;
    for (std::size_t p = 0; p < M.n_paths; ++p) {
      for (std::size_t a = 0; a + k < G; a += k) {
        s += std::pow(M.at(p, a + k) - M.at(p, a), order);
        ++cnt;
      }
    }
    const double m = s / static_cast<double>(cnt);
    out.moments.push_back(m);
    out.samples += cnt;
    lx.push_back(std::log(lag));
    ly.push_back(std::log(m));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.exponent = sxy / sxx;
  double c = 0.0;
  for (std::size_t i = 0; i < lags.size(); ++i) c += out.moments[i] / std::pow(lags[i], 0.5 * order);
  out.constant = c / n;
  return out;
}

std::vector<DriftBoundRow> drift_bound_diagnostic(const PathEnsemble& paths, const PotentialSpec& phi1,
                                                  const PotentialSpec& phi2, std::size_t coord,
                                                  const std::vector<double>& lags) {
  PathSeries comp;
  rescaled_martingale(paths, phi1, phi2, CoordinateTransform::F, coord, &comp);
  GibbsMeasure mu1 = GibbsMeasure::position(phi1);
  const std::size_t d = phi1.dim();
  const double grad2 = integrate_against(mu1, [&](std::span<const double> x) {
    std::array<double, kMaxDim> g{};
    phi1.grad_at(x, std::span<double>(g.data(), d));
    return g[coord] * g[coord];
  });
  std::vector<DriftBoundRow> rows;
  const std::size_t G = comp.grid();
  for (double lag : lags) {
    const std::size_t k = lag_steps(comp.times, lag);
    std::vector<double> sq;
    for (std::size_t p = 0; p < comp.n_paths; ++p)
      for (std::size_t a = 0; a + k < G; a += k) {
        double v = comp.at(p, a + k) - comp.at(p, a);
        sq.push_back(v * v);
      }
    DriftBoundRow r;
    r.lag = lag;
    r.lhs = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size());
    r.lhs_se = std::sqrt(variance(sq) / static_cast<double>(sq.size()));
    r.rhs = lag * lag * grad2;
    r.ok = r.lhs <= r.rhs + 3.0 * r.lhs_se;
    rows.push_back(r);
  }
  return rows;
}

Estimate semigroup_estimate(const PathEnsemble& paths, const TestFunction& f, double t) {
  require(f.dim() == paths.state_dim(), ErrorKind::DimensionMismatch, "test function dimension");
  const std::size_t k = paths.time_index(t);
  std::vector<double> v(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) v[p] = f.value(paths.state(p, k));
  Estimate e;
  e.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  e.stderr_ = v.size() > 1 ? std::sqrt(variance(v) / static_cast<double>(v.size())) : 0.0;
  return e;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), ErrorKind::InvalidParameter, "empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), ErrorKind::InvalidParameter, "empty sample");
  std::sort(sample.begin(), sample.end());
  const std::size_t n = sample.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::clamp(cdf(sample[i]), 1e-300, 1.0 - 1e-16);
    const double hi = std::clamp(cdf(sample[n - 1 - i]), 1e-300, 1.0 - 1e-16);
    s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log1p(-hi));
  }
  return -static_cast<double>(n) - s / static_cast<double>(n);
}

}  // namespace gshs
