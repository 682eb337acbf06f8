#include "gshs/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "gshs/error.hpp"
#include "gshs/rng.hpp"

namespace gshs {

namespace {

// Global adaptive Gauss-Kronrod: bisect the panel with the largest error
// estimate until the summed error is below tol times the L1 norm, or the
// panel budget 2^depth is spent. Measuring against the L1 norm keeps
// integrals that cancel to ~0 from driving every panel to full depth.
template <unsigned Points>
double gk(const std::function<double(double)>& f, double a, double b, double tol, unsigned depth,
          double* err) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, Points>;
  struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0, 0.0};
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    return p;
  };
  std::priority_queue<Panel> q;
  q.push(eval(a, b));
  double value = q.top().value, error = q.top().error, l1 = q.top().l1;
  const std::size_t budget = std::size_t{1} << std::min(depth, 20u);
  for (std::size_t n = 1; n < budget && error > tol * l1 && !q.empty(); ++n) {
    Panel w = q.top();
    q.pop();
    const double mid = 0.5 * (w.a + w.b);
    if (!(mid > w.a && mid < w.b)) break;
    Panel lo = eval(w.a, mid), hi = eval(mid, w.b);
    value += lo.value + hi.value - w.value;
    error += lo.error + hi.error - w.error;
    l1 += lo.l1 + hi.l1 - w.l1;
    q.push(lo);
    q.push(hi);
  }
  if (err) *err = error;
  return value;
}

struct Nested {
  std::size_t n;
  const NestedLimits& limits;
  const Integrand& f;
  double tol;
  unsigned depth;
  std::vector<double> p;

  double level(std::size_t k) {
    auto [a, b] = limits(k, std::span<const double>(p.data(), k));
    if (!(b > a)) return 0.0;
    std::function<double(double)> g = [this, k](double t) {
      p[k] = t;
      return k + 1 == n ? f(p) : level(k + 1);
    };
    // Inner levels run tighter so their noise stays below the outer tolerance.
    const double t = tol * std::pow(0.1, static_cast<double>(k + 1 < n ? 0 : n - 1));
    if (n <= 2) return gk<31>(g, a, b, t, depth, nullptr);
    return gk<15>(g, a, b, t, depth, nullptr);
  }
};

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b, double rel_tol,
                    unsigned max_depth, double* error_estimate) {
  if (!(b > a)) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  double v = gk<31>(f, a, b, rel_tol, max_depth, error_estimate);
  if (!std::isfinite(v)) fail(ErrorKind::NumericFailure, "1-d quadrature produced a non-finite value");
  return v;
}

double integrate_nested(std::size_t n, const NestedLimits& limits, const Integrand& f,
                        double rel_tol, unsigned max_depth) {
  require(n >= 1, ErrorKind::InvalidParameter, "nested quadrature needs n >= 1");
  Nested q{n, limits, f, rel_tol, max_depth, std::vector<double>(n, 0.0)};
  double v = q.level(0);
  if (!std::isfinite(v))
    fail(ErrorKind::NumericFailure, "nested quadrature produced a non-finite value");
  return v;
}

double integrate_box(std::span<const double> lo, std::span<const double> hi, const Integrand& f,
                     double rel_tol, unsigned max_depth) {
  require(lo.size() == hi.size(), ErrorKind::DimensionMismatch, "box bounds differ in dimension");
  std::vector<double> a(lo.begin(), lo.end()), b(hi.begin(), hi.end());
  return integrate_nested(
      a.size(), [&](std::size_t k, std::span<const double>) { return std::pair{a[k], b[k]}; }, f,
      rel_tol, max_depth);
}

double integrate_ball(std::span<const double> center, double radius, const Integrand& f,
                      double rel_tol, unsigned max_depth) {
  std::vector<double> c(center.begin(), center.end());
  if (c.size() == 2) {
    // Polar coordinates: integrands vanishing like a power of the distance to
    // the sphere stay smooth in rho, where chord limits would put a
    // fractional power at both ends of the outer interval.
    std::vector<double> q(2);
    Integrand polar = [&](std::span<const double> rt) {
      q[0] = c[0] + rt[0] * std::cos(rt[1]);
      q[1] = c[1] + rt[0] * std::sin(rt[1]);
      return rt[0] == 0.0 ? 0.0 : rt[0] * f(q);
    };
    std::vector<double> lo{0.0, 0.0}, hi{radius, 2.0 * std::numbers::pi};
    return integrate_box(lo, hi, polar, rel_tol, max_depth);
  }
  const double r2 = radius * radius;
  return integrate_nested(
      c.size(),
      [&](std::size_t k, std::span<const double> prefix) {
        double used = 0.0;
        for (std::size_t j = 0; j < k; ++j) used += (prefix[j] - c[j]) * (prefix[j] - c[j]);
        double h = std::sqrt(std::max(0.0, r2 - used));
        return std::pair{c[k] - h, c[k] + h};
      },
      f, rel_tol, max_depth);
}

MonteCarloResult integrate_monte_carlo(std::size_t n, std::span<const double> center, double scale,
                                       const Integrand& f, const QuadratureConfig& cfg) {
  require(scale > 0, ErrorKind::InvalidParameter, "Monte Carlo proposal scale must be positive");
  Rng rng(cfg.mc_seed, fnv1a("quadrature-mc"));
  std::vector<double> x(n);
  const double log_norm = 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) +
                          static_cast<double>(n) * std::log(scale);
  double sum = 0.0, sum2 = 0.0;
  std::size_t m = 0;
  MonteCarloResult out;
  while (m < cfg.mc_max_samples) {
    for (std::size_t b = 0; b < cfg.mc_batch; ++b) {
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double z = rng.normal();
        r2 += z * z;
        x[i] = center[i] + scale * z;
      }
      double w = f(x) * std::exp(0.5 * r2 + log_norm);
      if (!std::isfinite(w)) fail(ErrorKind::NumericFailure, "Monte Carlo weight is not finite");
      sum += w;
      sum2 += w * w;
    }
    m += cfg.mc_batch;
    double mean = sum / m;
    double var = std::max(0.0, sum2 / m - mean * mean);
    out.value = mean;
    out.samples = m;
    out.rel_std_error = mean != 0.0 ? std::sqrt(var / m) / std::abs(mean) : INFINITY;
    if (out.rel_std_error <= cfg.mc_rel_err) return out;
  }
  fail(ErrorKind::NumericFailure, "Monte Carlo integral did not reach the target relative error");
}

}  // namespace gshs
