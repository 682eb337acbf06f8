#include "gshs/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gshs/error.hpp"
#include "gshs/generator.hpp"
#include "gshs/measures.hpp"
#include "gshs/quadrature.hpp"
#include "gshs/rng.hpp"

namespace gshs {

namespace {

// Quintic smoothstep and its derivatives on [0, 1].
double smooth5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smooth5_d1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double smooth5_d2(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

double cutoff_profile(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth5(r - 1.0);
}

double cutoff_profile_d1(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -smooth5_d1(r - 1.0);
}

double cutoff_profile_d2(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -smooth5_d2(r - 1.0);
}

CutoffFunction build_cutoff(double eps, std::size_t d) {
  require(eps > 0 && eps <= 1.0, ErrorKind::InvalidParameter, "cutoff needs eps in (0, 1]");
  require(d >= 1 && d <= kMaxDim, ErrorKind::InvalidParameter, "cutoff dimension out of range");
  CutoffFunction c;
  c.eps = eps;
  c.d = d;
  c.inner_radius = 1.0 / (eps * eps);
  c.outer_radius = 2.0 / (eps * eps);
  // max|s'| = 15/8, max|s''| = 10/sqrt(3); the (d-1) q'/|v| part of the
  // Laplacian is at most (d-1) 15/8 eps^4 because |v| >= eps^-2 there.
  const double s1 = 1.875, s2 = 10.0 / std::sqrt(3.0);
  c.C = std::max(s1, s2 + static_cast<double>(d - 1) * s1);
  return c;
}

double CutoffFunction::value(std::span<const double> v) const {
  return cutoff_profile(norm(v) * eps * eps);
}

void CutoffFunction::gradient(std::span<const double> v, std::span<double> g) const {
  const double r = norm(v);
  const double e2 = eps * eps;
  const double q1 = cutoff_profile_d1(r * e2);
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = q1 == 0.0 ? 0.0 : q1 * e2 * v[i] / r;
}

void CutoffFunction::hessian_diag(std::span<const double> v, std::span<double> h) const {
  const double r = norm(v);
  const double e2 = eps * eps;
  const double q1 = cutoff_profile_d1(r * e2);
  const double q2 = cutoff_profile_d2(r * e2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (q1 == 0.0 && q2 == 0.0) {
      h[i] = 0.0;
      continue;
    }
    const double u = v[i] / r;
    h[i] = q2 * e2 * e2 * u * u + q1 * e2 * (1.0 - u * u) / r;
  }
}

double CutoffFunction::laplacian(std::span<const double> v) const {
  const double r = norm(v);
  const double e2 = eps * eps;
  const double q1 = cutoff_profile_d1(r * e2);
  const double q2 = cutoff_profile_d2(r * e2);
  if (q1 == 0.0 && q2 == 0.0) return 0.0;
  return q2 * e2 * e2 + q1 * e2 * static_cast<double>(v.size() - 1) / r;
}

namespace {

class Embedded final : public TestFunction {
 public:
  Embedded(TestFn f, CutoffFunction eta) : f_(std::move(f)), eta_(eta), d_(f_->dim()) {
    require(eta_.d == d_, ErrorKind::DimensionMismatch, "cutoff and test function dimensions differ");
  }
  std::size_t dim() const override { return 2 * d_; }
  double value(std::span<const double> p) const override {
    double e = eta_.value(p.subspan(d_, d_));
    if (e == 0.0) return 0.0;
    auto s = sigma(p);
    return f_->value(std::span<const double>(s.data(), d_)) * e;
  }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    auto s = sigma(p);
    std::span<const double> ss(s.data(), d_), v = p.subspan(d_, d_);
    std::array<double, kMaxDim> gf{}, ge{};
    f_->gradient(ss, std::span<double>(gf.data(), d_));
    eta_.gradient(v, std::span<double>(ge.data(), d_));
    const double fv = f_->value(ss), e = eta_.value(v);
    for (std::size_t i = 0; i < d_; ++i) {
      g[i] = gf[i] * e;
      g[d_ + i] = gf[i] * e + fv * ge[i];
    }
  }
  void hessian_diag(std::span<const double> p, std::span<double> h) const override {
    auto s = sigma(p);
    std::span<const double> ss(s.data(), d_), v = p.subspan(d_, d_);
    std::array<double, kMaxDim> gf{}, hf{}, ge{}, he{};
    f_->gradient(ss, std::span<double>(gf.data(), d_));
    f_->hessian_diag(ss, std::span<double>(hf.data(), d_));
    eta_.gradient(v, std::span<double>(ge.data(), d_));
    eta_.hessian_diag(v, std::span<double>(he.data(), d_));
    const double fv = f_->value(ss), e = eta_.value(v);
    for (std::size_t i = 0; i < d_; ++i) {
      h[i] = hf[i] * e;
      h[d_ + i] = hf[i] * e + 2.0 * gf[i] * ge[i] + fv * he[i];
    }
  }
  double support_radius() const override {
    const double rf = f_->support_radius();
    if (!std::isfinite(rf)) return kInf;
    const double rv = eta_.outer_radius;
    return std::sqrt((rf + rv) * (rf + rv) + rv * rv);
  }
  std::vector<double> support_center() const override {
    auto c = f_->support_center();
    c.resize(2 * d_, 0.0);
    return c;
  }
  bool smooth() const override { return false; }
  std::string describe() const override {
    return "Psi[eps=" + std::to_string(eta_.eps) + "](" + f_->describe() + ")";
  }

 private:
  std::array<double, kMaxDim> sigma(std::span<const double> p) const {
    std::array<double, kMaxDim> s{};
    for (std::size_t i = 0; i < d_; ++i) s[i] = p[i] + p[d_ + i];
    return s;
  }
  TestFn f_;
  CutoffFunction eta_;
  std::size_t d_;
};

// Integrals against mu_eps = mu_{Phi1} (x) mu_{Phi2^eps} of functions G(x, v)
// that vanish unless x + v lies in the ball B(c, r).
class SigmaIntegrator {
 public:
  SigmaIntegrator(const PotentialSpec& phi1, const PotentialSpec& phi2, double eps, double rel_tol)
      : mu1_(GibbsMeasure::position(phi1)),
        mu2_(GibbsMeasure::velocity(phi2)),
        eps_(eps),
        d_(phi1.dim()),
        tol_(rel_tol) {
    require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch, "potential dimensions differ");
    require(d_ <= 2, ErrorKind::InvalidParameter, "scaling numerics support d <= 2");
    require(!phi2.singular(), ErrorKind::PreconditionViolation,
            "the velocity potential must have no singularities");
    mu1_.log_normalization();
    mu2_.log_normalization();
    x_lo_ = mu1_.box_lo();
    x_hi_ = mu1_.box_hi();
    auto vl = mu2_.box_lo(), vh = mu2_.box_hi();
    const double R2 = 2.0 / (eps * eps);
    v_lo_.resize(d_);
    v_hi_.resize(d_);
    for (std::size_t k = 0; k < d_; ++k) {
      v_lo_[k] = std::max(eps * vl[k], -R2);
      v_hi_[k] = std::min(eps * vh[k], R2);
    }
  }

  double w1(std::span<const double> x) const { return mu1_.density(x); }
  double w2(std::span<const double> v) const {
    std::array<double, kMaxDim> u{};
    for (std::size_t i = 0; i < d_; ++i) u[i] = v[i] / eps_;
    return mu2_.density(std::span<const double>(u.data(), d_)) / std::pow(eps_, static_cast<double>(d_));
  }

  // v outer (split at +-eps^-2 so the cutoff annulus is a separate panel), x inner on the chord.
  double direct(const std::function<double(std::span<const double>, std::span<const double>)>& G,
                const std::vector<double>& c, double r) const {
    const double R = 1.0 / (eps_ * eps_);
    double total = 0.0;
    for (const auto& panel : panels(R)) {
      std::vector<double> pt(2 * d_);
      total += integrate_nested(
          2 * d_,
          [&](std::size_t k, std::span<const double> pre) -> std::pair<double, double> {
            if (k < d_) return panel[k];
            const std::size_t i = k - d_;
            double used = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
              double y = pre[d_ + j] + pre[j] - c[j];
              used += y * y;
            }
            double h = std::sqrt(std::max(0.0, r * r - used));
            double a = c[i] - h - pre[i], b = c[i] + h - pre[i];
            return {std::max(a, x_lo_[i]), std::min(b, x_hi_[i])};
          },
          [&](std::span<const double> q) {
            std::span<const double> v = q.subspan(0, d_), x = q.subspan(d_, d_);
            double a = w2(v);
            if (a == 0.0) return 0.0;
            double b = w1(x);
            if (b == 0.0) return 0.0;
            return G(x, v) * a * b;
          },
          tol_, 14);
    }
    return total;
  }

  // x outer, y = x + v inner over the ball, restricted to x + [v_lo, v_hi].
  double convolution(const std::function<double(std::span<const double>, std::span<const double>)>& G,
                     const std::vector<double>& c, double r) const {
    return integrate_nested(
        2 * d_,
        [&](std::size_t k, std::span<const double> pre) -> std::pair<double, double> {
          if (k < d_) return {std::max(x_lo_[k], c[k] - r - v_hi_[k]), std::min(x_hi_[k], c[k] + r - v_lo_[k])};
          const std::size_t i = k - d_;
          double used = 0.0;
          for (std::size_t j = 0; j < i; ++j) used += (pre[d_ + j] - c[j]) * (pre[d_ + j] - c[j]);
          double h = std::sqrt(std::max(0.0, r * r - used));
          return {std::max(c[i] - h, pre[i] + v_lo_[i]), std::min(c[i] + h, pre[i] + v_hi_[i])};
        },
        [&](std::span<const double> q) {
          std::array<double, kMaxDim> v{};
          for (std::size_t i = 0; i < d_; ++i) v[i] = q[d_ + i] - q[i];
          std::span<const double> vs(v.data(), d_), x = q.subspan(0, d_);
          double a = w2(vs);
          if (a == 0.0) return 0.0;
          double b = w1(x);
          if (b == 0.0) return 0.0;
          return G(x, vs) * a * b;
        },
        tol_, 14);
  }

  // Integral of g(v) d mu_{Phi2^eps}, optionally restricted to |v| > R.
  double velocity_integral(const std::function<double(std::span<const double>)>& g, double R_min) const {
    const double R = 1.0 / (eps_ * eps_);
    double total = 0.0;
    for (const auto& panel : panels(R)) {
      std::vector<double> lo(d_), hi(d_);
      for (std::size_t k = 0; k < d_; ++k) {
        lo[k] = panel[k].first;
        hi[k] = panel[k].second;
      }
      total += integrate_box(lo, hi, [&](std::span<const double> v) {
        if (norm(v) <= R_min) return 0.0;
        double a = w2(v);
        return a == 0.0 ? 0.0 : g(v) * a;
      }, tol_, 14);
    }
    return total;
  }

  const GibbsMeasure& position_measure() const { return mu1_; }
  double rel_tol() const { return tol_; }

 private:
  // Product panels of the v box, each coordinate split at +-R.
  std::vector<std::vector<std::pair<double, double>>> panels(double R) const {
    std::vector<std::vector<std::pair<double, double>>> out{{}};
    for (std::size_t k = 0; k < d_; ++k) {
      std::vector<double> cuts{v_lo_[k]};
      for (double c : {-R, R})
        if (c > v_lo_[k] && c < v_hi_[k]) cuts.push_back(c);
      cuts.push_back(v_hi_[k]);
      std::vector<std::vector<std::pair<double, double>>> next;
      for (const auto& pre : out) {
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
          auto p = pre;
          p.emplace_back(cuts[j], cuts[j + 1]);
          next.push_back(std::move(p));
        }
      }
      out = std::move(next);
    }
    return out;
  }

  GibbsMeasure mu1_, mu2_;
  double eps_;
  std::size_t d_;
  double tol_;
  std::vector<double> x_lo_, x_hi_, v_lo_, v_hi_;
};

double tol_for(std::size_t d, const ScalingOptions& opts) {
  return d == 1 ? opts.rel_tol : std::max(opts.rel_tol, 1e-7);
}

void require_compact(const TestFunction& f, std::size_t d) {
  require(f.dim() == d, ErrorKind::DimensionMismatch, "test function must live on R^d");
  require(std::isfinite(f.support_radius()), ErrorKind::PreconditionViolation,
          "test function must be compactly supported");
}

double limit_integral(const GibbsMeasure& mu1, const TestFunction& f, const Integrand& g) {
  auto c = f.support_center();
  return integrate_on_ball(mu1, g, c, f.support_radius());
}

}  // namespace

TestFn embed(TestFn f, const CutoffFunction& eta) {
  require(static_cast<bool>(f), ErrorKind::InvalidParameter, "null test function");
  return std::make_shared<Embedded>(std::move(f), eta);
}

NormPoint embedded_norm(const TestFunction& f, const PotentialSpec& phi1, const PotentialSpec& phi2,
                        double eps, const ScalingOptions& opts) {
  const std::size_t d = phi1.dim();
  require_compact(f, d);
  const CutoffFunction eta = build_cutoff(eps, d);
  SigmaIntegrator si(phi1, phi2, eps, tol_for(d, opts));
  auto G = [&](std::span<const double> x, std::span<const double> v) {
    double e = eta.value(v);
    if (e == 0.0) return 0.0;
    std::array<double, kMaxDim> s{};
    for (std::size_t i = 0; i < d; ++i) s[i] = x[i] + v[i];
    double fv = f.value(std::span<const double>(s.data(), d));
    return fv * fv * e * e;
  };
  const auto c = f.support_center();
  const double r = f.support_radius();
  NormPoint np;
  np.eps = eps;
  np.norm_direct = std::sqrt(si.direct(G, c, r));
  np.norm_convolution = std::sqrt(si.convolution(G, c, r));
  np.norm_limit = std::sqrt(limit_integral(si.position_measure(), f, [&](std::span<const double> x) {
    double v = f.value(x);
    return v * v;
  }));
  np.alpha = si.velocity_integral([&](std::span<const double> v) {
    double e = eta.value(v);
    return e * e;
  }, -1.0);
  np.alpha_tail_bound = si.velocity_integral([](std::span<const double>) { return 1.0; }, eta.inner_radius);
  return np;
}

namespace {

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ConvergenceReport norm_convergence_curve(const TestFunction& f, const PotentialSpec& phi1,
                                         const PotentialSpec& phi2, std::vector<double> eps_grid,
                                         const ScalingOptions& opts) {
  require(!eps_grid.empty(), ErrorKind::InvalidParameter, "empty eps grid");
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  ConvergenceReport rep;
  rep.title = "Kuwae-Shioya norm convergence";
  rep.columns = {"eps", "norm_direct", "norm_convolution", "norm_limit", "alpha_eps", "relative_error", "route_gap"};
  std::vector<NormPoint> pts;
  for (double eps : eps_grid) {
    NormPoint np = embedded_norm(f, phi1, phi2, eps, opts);
    pts.push_back(np);
    rep.rows.push_back({np.eps, np.norm_direct, np.norm_convolution, np.norm_limit, np.alpha,
                        np.relative_error(), np.route_gap()});
  }
  std::vector<double> err;
  double worst_gap = 0.0;
  bool alpha_ok = true;
  for (const auto& p : pts) {
    err.push_back(p.relative_error());
    worst_gap = std::max(worst_gap, p.route_gap());
    alpha_ok = alpha_ok && std::abs(p.alpha - 1.0) <= p.alpha_tail_bound + 1e-9;
  }
  if (pts.size() >= 2)
    rep.add_check("norm error strictly decreasing in eps", strictly_decreasing(err), "relative errors " + fmt(err.front()) + " .. " + fmt(err.back()));
  else
    rep.skip_check("norm error strictly decreasing in eps", "eps grid has a single entry");
  rep.add_check("norm error <= 1% at smallest eps", err.back() <= 0.01, fmt(err.back()));
  rep.add_check("direct and convolution routes agree to 1e-4", worst_gap <= 1e-4, fmt(worst_gap));
  rep.add_check("alpha_eps = 1 +- 1e-6 at smallest eps", std::abs(pts.back().alpha - 1.0) <= 1e-6,
                fmt(pts.back().alpha));
  rep.add_check("|alpha_eps - 1| within the tail bound", alpha_ok, "tail-bound consistency on every eps");
  return rep;
}

std::array<double, 6> generator_summands(const TestFunction& f, const PotentialSpec& phi1,
                                         const PotentialSpec& phi2_eps, const CutoffFunction& eta,
                                         std::span<const double> p) {
  const std::size_t d = phi1.dim();
  std::span<const double> x = p.subspan(0, d), v = p.subspan(d, d);
  std::array<double, kMaxDim> s{}, gf{}, hf{}, ge{}, g1{}, g2{};
  for (std::size_t i = 0; i < d; ++i) s[i] = x[i] + v[i];
  std::span<const double> ss(s.data(), d);
  const double fv = f.value(ss);
  f.gradient(ss, std::span<double>(gf.data(), d));
  f.hessian_diag(ss, std::span<double>(hf.data(), d));
  eta.gradient(v, std::span<double>(ge.data(), d));
  phi1.grad_at(x, std::span<double>(g1.data(), d));
  phi2_eps.grad_at(v, std::span<double>(g2.data(), d));
  const double e = eta.value(v);
  const double lap_eta = eta.laplacian(v);
  double lap_f = 0.0, gf_ge = 0.0, g1_ge = 0.0, g2_ge = 0.0, g1_gf = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lap_f += hf[i];
    gf_ge += gf[i] * ge[i];
    g1_ge += g1[i] * ge[i];
    g2_ge += g2[i] * ge[i];
    g1_gf += g1[i] * gf[i];
  }
  return {fv * lap_eta, 2.0 * gf_ge, -g1_ge * fv, -g2_ge * fv, lap_f * e, -g1_gf * e};
}

SummandNorms generator_summand_norms(const TestFunction& f, const PotentialSpec& phi1,
                                     const PotentialSpec& phi2, double eps,
                                     const ScalingOptions& opts, std::uint64_t seed) {
  const std::size_t d = phi1.dim();
  require_compact(f, d);
  const CutoffFunction eta = build_cutoff(eps, d);
  const PotentialSpec phi2e = scale_velocity_potential(phi2, eps);
  SigmaIntegrator si(phi1, phi2, eps, tol_for(d, opts));
  const auto c = f.support_center();
  const double r = f.support_radius();
  SummandNorms out;
  out.eps = eps;

  auto summands = [&](std::span<const double> x, std::span<const double> v) {
    std::array<double, 2 * kMaxDim> p{};
    std::copy(x.begin(), x.end(), p.begin());
    std::copy(v.begin(), v.end(), p.begin() + static_cast<std::ptrdiff_t>(d));
    return generator_summands(f, phi1, phi2e, eta, std::span<const double>(p.data(), 2 * d));
  };
  auto drift_at = [&](std::span<const double> y, std::span<const double> x) {
    std::array<double, kMaxDim> gf{}, g1{};
    f.gradient(y, std::span<double>(gf.data(), d));
    phi1.grad_at(x, std::span<double>(g1.data(), d));
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += g1[i] * gf[i];
    return s;
  };
  auto lap_at = [&](std::span<const double> y) {
    std::array<double, kMaxDim> hf{};
    f.hessian_diag(y, std::span<double>(hf.data(), d));
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += hf[i];
    return s;
  };
  for (std::size_t k = 0; k < 6; ++k) {
    auto G = [&, k](std::span<const double> x, std::span<const double> v) {
      double t = summands(x, v)[k];
      return t * t;
    };
    out.norms[k] = std::sqrt(si.direct(G, c, r));
  }
  // Embedding distances: T5 - Psi(Lap f) and T6 + Psi(grad Phi1 . grad f).
  auto G5 = [&](std::span<const double> x, std::span<const double> v) {
    std::array<double, kMaxDim> y{};
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + v[i];
    double t = summands(x, v)[4] - lap_at(std::span<const double>(y.data(), d)) * eta.value(v);
    return t * t;
  };
  auto G6 = [&](std::span<const double> x, std::span<const double> v) {
    std::array<double, kMaxDim> y{};
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + v[i];
    std::span<const double> ys(y.data(), d);
    if (!phi1.finite_domain(ys)) return 0.0;
    double t = summands(x, v)[5] + drift_at(ys, ys) * eta.value(v);
    return t * t;
  };
  const GibbsMeasure& mu1 = si.position_measure();
  out.laplacian_limit = std::sqrt(limit_integral(mu1, f, [&](std::span<const double> y) {
    double l = lap_at(y);
    return l * l;
  }));
  out.drift_limit = std::sqrt(limit_integral(mu1, f, [&](std::span<const double> y) {
    double l = drift_at(y, y);
    return l * l;
  }));
  out.term5_distance = std::abs(out.norms[4] - out.laplacian_limit) / out.laplacian_limit;
  out.term6_distance = std::abs(out.norms[5] - out.drift_limit) / out.drift_limit;
  out.term5_embedding_distance = std::sqrt(si.direct(G5, c, r)) / out.laplacian_limit;
  out.term6_embedding_distance = std::sqrt(si.direct(G6, c, r)) / out.drift_limit;

  // Pointwise reconstruction against the generator applied to Psi_eps f.
  TestFn fcopy(std::shared_ptr<const TestFunction>(&f, [](const TestFunction*) {}));
  TestFn psi = embed(fcopy, eta);
  Rng rng(derive_seed(seed, "reconstruction"), 0);
  std::vector<double> p(2 * d);
  double worst = 0.0;
  int done = 0;
  for (int attempt = 0; attempt < 10000 && done < 100; ++attempt) {
    // Half the points with |v| in the cutoff annulus, half near the origin.
    double vr = attempt % 2 ? eta.inner_radius * (1.0 + rng.uniform()) : 3.0 * eps * rng.uniform();
    double nrm = 0.0;
    std::array<double, kMaxDim> dir{};
    for (std::size_t i = 0; i < d; ++i) {
      dir[i] = rng.normal();
      nrm += dir[i] * dir[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
      p[d + i] = vr * dir[i] / std::sqrt(nrm);
      p[i] = c[i] + r * (2.0 * rng.uniform() - 1.0) - p[d + i];
    }
    if (!phi1.finite_domain(std::span<const double>(p.data(), d))) continue;
    auto t = generator_summands(f, phi1, phi2e, eta, p);
    double sum = t[0] + t[1] + t[2] + t[3] + t[4] + t[5];
    double ref = apply_gshs_generator(phi1, phi2e, 1.0, *psi, p);
    worst = std::max(worst, std::abs(sum - ref) / (1.0 + std::abs(ref)));
    ++done;
  }
  out.reconstruction_error = worst;
  return out;
}

double embedded_pairing(const TestFunction& u, const TestFunction& phi, const PotentialSpec& phi1,
                        const PotentialSpec& phi2, double eps, const ScalingOptions& opts) {
  const std::size_t d = phi1.dim();
  require_compact(u, d);
  require_compact(phi, d);
  const CutoffFunction eta = build_cutoff(eps, d);
  SigmaIntegrator si(phi1, phi2, eps, tol_for(d, opts));
  auto G = [&](std::span<const double> x, std::span<const double> v) {
    double e = eta.value(v);
    if (e == 0.0) return 0.0;
    std::array<double, kMaxDim> s{};
    for (std::size_t i = 0; i < d; ++i) s[i] = x[i] + v[i];
    std::span<const double> ss(s.data(), d);
    return u.value(ss) * phi.value(ss) * e * e;
  };
  const TestFunction& small = u.support_radius() <= phi.support_radius() ? u : phi;
  return si.direct(G, small.support_center(), small.support_radius());
}

double limit_pairing(const TestFunction& u, const TestFunction& phi, const PotentialSpec& phi1,
                     const ScalingOptions&) {
  require_compact(u, phi1.dim());
  require_compact(phi, phi1.dim());
  GibbsMeasure mu1 = GibbsMeasure::position(phi1);
  const TestFunction& small = u.support_radius() <= phi.support_radius() ? u : phi;
  return limit_integral(mu1, small, [&](std::span<const double> x) { return u.value(x) * phi.value(x); });
}

ConvergenceReport semigroup_report(const TestFunction& f, const PotentialSpec& phi1,
                                   const PotentialSpec& phi2, std::vector<double> eps_grid,
                                   const ScalingOptions& opts) {
  ConvergenceReport rep = norm_convergence_curve(f, phi1, phi2, eps_grid, opts);
  rep.title = "Kuwae-Shioya norm and generator-summand convergence";
  for (const char* c : {"term1_norm", "term2_norm", "term3_norm", "term4_norm", "term5_distance",
                        "term6_distance", "term5_embedding_distance", "term6_embedding_distance",
                        "reconstruction_error"})
    rep.columns.push_back(c);
  std::vector<SummandNorms> sn;
  for (auto& row : rep.rows) {
    SummandNorms s = generator_summand_norms(f, phi1, phi2, row[0], opts);
    for (std::size_t k = 0; k < 4; ++k) row.push_back(s.norms[k]);
    row.push_back(s.term5_distance);
    row.push_back(s.term6_distance);
    row.push_back(s.term5_embedding_distance);
    row.push_back(s.term6_embedding_distance);
    row.push_back(s.reconstruction_error);
    sn.push_back(s);
  }
  const auto& first = sn.front();
  const auto& last = sn.back();
  if (sn.size() >= 2) {
    for (std::size_t k = 0; k < 4; ++k) {
      bool ok = last.norms[k] <= 0.1 * first.norms[k];
      rep.add_check("term" + std::to_string(k + 1) + " norm at smallest eps <= 10% of largest eps", ok,
                    fmt(last.norms[k]) + " vs " + fmt(first.norms[k]));
    }
  } else {
    rep.skip_check("terms 1-4 decay", "eps grid has a single entry");
  }
  rep.add_check("term5 distance <= 2% at smallest eps", last.term5_distance <= 0.02, fmt(last.term5_distance));
  double worst = 0.0;
  for (const auto& s : sn) worst = std::max(worst, s.reconstruction_error);
  rep.add_check("six summands reconstruct the generator to 1e-10", worst <= 1e-10, fmt(worst));
  return rep;
}

}  // namespace gshs
