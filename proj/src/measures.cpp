#include "gshs/measures.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "gshs/error.hpp"
#include "gshs/parallel.hpp"
#include "gshs/rng.hpp"

namespace gshs {

namespace {

struct Probe {
  double min_value = kInf;
  std::vector<double> argmin;
  std::vector<double> lo, hi;  // extents of the sublevel set
  bool touches = false;
  double spacing = 0.0;
};

// Evaluates phi on a grid (d <= 2) or a fixed pseudo-random cloud (d >= 3)
// over the box [a, b] and records the sublevel set {phi - min <= thr}.
Probe probe_box(const PotentialSpec& phi, const std::vector<double>& a, const std::vector<double>& b,
                double thr) {
  const std::size_t d = phi.dim();
  std::vector<std::vector<double>> pts;
  std::vector<double> spacing(d);
  if (d == 1) {
    const int n = 20001;
    spacing[0] = (b[0] - a[0]) / (n - 1);
    for (int i = 0; i < n; ++i) pts.push_back({a[0] + i * spacing[0]});
  } else if (d == 2) {
    const int n = 301;
    for (std::size_t k = 0; k < 2; ++k) spacing[k] = (b[k] - a[k]) / (n - 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pts.push_back({a[0] + i * spacing[0], a[1] + j * spacing[1]});
  } else {
    Rng rng(0x7e57, fnv1a("truncation-probe"));
    const int n = 200000;
    for (std::size_t k = 0; k < d; ++k) spacing[k] = (b[k] - a[k]) / std::pow(n, 1.0 / d);
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = a[k] + (b[k] - a[k]) * rng.uniform();
      pts.push_back(std::move(p));
    }
  }
  std::vector<double> vals(pts.size());
  Probe pr;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double v = phi.value_at(pts[i]);
    vals[i] = v;
    if (std::isfinite(v) && v < pr.min_value) {
      pr.min_value = v;
      pr.argmin = pts[i];
    }
  }
  if (!std::isfinite(pr.min_value)) return pr;
  pr.lo.assign(d, kInf);
  pr.hi.assign(d, -kInf);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(vals[i] - pr.min_value <= thr)) continue;
    for (std::size_t k = 0; k < d; ++k) {
      pr.lo[k] = std::min(pr.lo[k], pts[i][k]);
      pr.hi[k] = std::max(pr.hi[k], pts[i][k]);
    }
  }
  double sp = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    sp = std::max(sp, spacing[k]);
    double edge = 1.5 * spacing[k];
    if (pr.lo[k] <= a[k] + edge || pr.hi[k] >= b[k] - edge) pr.touches = true;
  }
  pr.spacing = sp;
  return pr;
}

// Compass search polish of the minimum.
void polish_min(const PotentialSpec& phi, std::vector<double>& x, double& fx, double step) {
  const std::size_t d = x.size();
  while (step > 1e-13 * (1.0 + std::abs(x[0]))) {
    bool improved = false;
    for (std::size_t k = 0; k < d; ++k) {
      for (double s : {step, -step}) {
        auto y = x;
        y[k] += s;
        double fy = phi.value_at(y);
        if (fy < fx) {
          x = y;
          fx = fy;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
}

}  // namespace

std::optional<TruncationBox> truncation_box(const PotentialSpec& phi, const QuadratureConfig& cfg) {
  const std::size_t d = phi.dim();
  const double thr = cfg.truncation_log;
  Probe pr;
  bool found = false;
  for (double half = 50.0; half <= 1.0e4; half *= 4.0) {
    std::vector<double> a(d, -half), b(d, half);
    pr = probe_box(phi, a, b, thr);
    if (!std::isfinite(pr.min_value)) continue;
    if (!pr.touches) {
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  // Zoom in until the extents stabilise at a resolution fine enough to
  // resolve narrow wells.
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<double> a(d), b(d);
    for (std::size_t k = 0; k < d; ++k) {
      double w = pr.hi[k] - pr.lo[k];
      double pad = std::max(0.5 * w, 4.0 * pr.spacing);
      a[k] = pr.lo[k] - pad;
      b[k] = pr.hi[k] + pad;
    }
    Probe next = probe_box(phi, a, b, thr);
    if (!std::isfinite(next.min_value)) break;
    bool stable = !next.touches;
    for (std::size_t k = 0; k < d && stable; ++k) {
      double w = next.hi[k] - next.lo[k];
      stable = w > 0 && std::abs(w - (pr.hi[k] - pr.lo[k])) <= 0.02 * w && next.spacing < 0.02 * w;
    }
    pr = next;
    if (stable) break;
  }
  TruncationBox box;
  box.argmin = pr.argmin;
  box.min_value = pr.min_value;
  polish_min(phi, box.argmin, box.min_value, pr.spacing);
  box.lo.resize(d);
  box.hi.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    double pad = 2.0 * pr.spacing;
    box.lo[k] = pr.lo[k] - pad;
    box.hi[k] = pr.hi[k] + pad;
  }
  return box;
}

struct GibbsMeasure::Marginal {
  PotentialSpec phi;
  QuadratureConfig cfg;
  std::once_flag box_once, norm_once;
  std::optional<TruncationBox> box;
  double log_z = kInf;
  double shifted_mass = kInf;  // integral of e^{min - phi}
  std::string failure;

  Marginal(PotentialSpec p, QuadratureConfig c) : phi(std::move(p)), cfg(c) {}

  const TruncationBox& get_box() {
    std::call_once(box_once, [&] { box = truncation_box(phi, cfg); });
    if (!box)
      fail(ErrorKind::NumericFailure,
           "Gibbs weight of " + phi.name() + " is not confined; normalization diverges");
    return *box;
  }

  double shifted(std::span<const double> p) const {
    double v = phi.value_at(p);
    if (!std::isfinite(v)) return 0.0;
    return std::exp(box->min_value - v);
  }

  void ensure_normalized() {
    const TruncationBox& b = get_box();
    std::call_once(norm_once, [&] {
      const std::size_t d = phi.dim();
      Integrand f = [this](std::span<const double> p) { return shifted(p); };
      if (d <= 2) {
        double i1 = integrate_box(b.lo, b.hi, f, cfg.rel_tol * 10.0, cfg.max_depth);
        std::vector<double> lo2(d), hi2(d);
        for (std::size_t k = 0; k < d; ++k) {
          double w = b.hi[k] - b.lo[k];
          lo2[k] = b.lo[k] - 0.5 * w;
          hi2[k] = b.hi[k] + 0.5 * w;
        }
        double i2 = integrate_box(lo2, hi2, f, cfg.rel_tol, cfg.max_depth + 2);
        if (!(i2 > 0) || std::abs(i1 - i2) > cfg.refine_rel * i2) {
          failure = "normalization of the Gibbs measure of " + phi.name() +
                    " did not converge under refinement";
          return;
        }
        shifted_mass = i2;
      } else {
        std::vector<double> c(d);
        double half = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          c[k] = b.argmin[k];
          half = std::max(half, 0.5 * (b.hi[k] - b.lo[k]));
        }
        auto mc = integrate_monte_carlo(d, c, half / 3.0, f, cfg);
        shifted_mass = mc.value;
      }
      log_z = std::log(shifted_mass) - b.min_value;
    });
    if (!failure.empty()) fail(ErrorKind::NumericFailure, failure);
  }
};

GibbsMeasure::GibbsMeasure(PotentialSpec phi1, PotentialSpec phi2, QuadratureConfig cfg)
    : phi1_(std::move(phi1)), phi2_(std::move(phi2)), cfg_(cfg) {
  if (phi1_) m1_ = std::make_shared<Marginal>(phi1_, cfg_);
  if (phi2_) m2_ = std::make_shared<Marginal>(phi2_, cfg_);
}

GibbsMeasure GibbsMeasure::joint(PotentialSpec phi1, PotentialSpec phi2, QuadratureConfig cfg) {
  require(phi1 && phi2, ErrorKind::InvalidParameter, "joint Gibbs measure needs both potentials");
  require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch,
          "position and velocity potentials differ in dimension");
  return GibbsMeasure(std::move(phi1), std::move(phi2), cfg);
}

GibbsMeasure GibbsMeasure::position(PotentialSpec phi1, QuadratureConfig cfg) {
  require(static_cast<bool>(phi1), ErrorKind::InvalidParameter, "missing position potential");
  return GibbsMeasure(std::move(phi1), PotentialSpec{}, cfg);
}

GibbsMeasure GibbsMeasure::velocity(PotentialSpec phi2, QuadratureConfig cfg) {
  require(static_cast<bool>(phi2), ErrorKind::InvalidParameter, "missing velocity potential");
  return GibbsMeasure(PotentialSpec{}, std::move(phi2), cfg);
}

std::size_t GibbsMeasure::d() const { return phi1_ ? phi1_.dim() : phi2_.dim(); }

std::size_t GibbsMeasure::dim_total() const { return (phi1_ && phi2_) ? 2 * d() : d(); }

std::string GibbsMeasure::label() const {
  if (phi1_ && phi2_) return "mu[" + phi1_.name() + " + " + phi2_.name() + "]";
  return "mu[" + (phi1_ ? phi1_.name() : phi2_.name()) + "]";
}

double GibbsMeasure::log_unnormalized_density(std::span<const double> p) const {
  const std::size_t dd = d();
  double s = 0.0;
  std::size_t off = 0;
  if (phi1_) {
    s += phi1_.value_at(p.subspan(0, dd));
    off = dd;
  }
  if (phi2_) s += phi2_.value_at(p.subspan(off, dd));
  if (std::isnan(s) || s == kInf) return -kInf;
  return -s;
}

double GibbsMeasure::unnormalized_density(std::span<const double> p) const {
  return std::exp(log_unnormalized_density(p));
}

double GibbsMeasure::log_normalization() const {
  double lz = 0.0;
  if (m1_) {
    m1_->ensure_normalized();
    lz += m1_->log_z;
  }
  if (m2_) {
    m2_->ensure_normalized();
    lz += m2_->log_z;
  }
  return lz;
}

double GibbsMeasure::density(std::span<const double> p) const {
  return std::exp(log_unnormalized_density(p) - log_normalization());
}

// e^{min - phi} product divided by the shifted masses, i.e. the normalized density.
double GibbsMeasure::shifted_density(std::span<const double> p) const {
  const std::size_t dd = d();
  double r = 1.0;
  std::size_t off = 0;
  if (m1_) {
    r *= m1_->shifted(p.subspan(0, dd)) / m1_->shifted_mass;
    off = dd;
  }
  if (m2_) r *= m2_->shifted(p.subspan(off, dd)) / m2_->shifted_mass;
  return r;
}

std::vector<double> GibbsMeasure::box_lo() const {
  std::vector<double> out;
  if (m1_) {
    auto& b = m1_->get_box();
    out.insert(out.end(), b.lo.begin(), b.lo.end());
  }
  if (m2_) {
    auto& b = m2_->get_box();
    out.insert(out.end(), b.lo.begin(), b.lo.end());
  }
  return out;
}

std::vector<double> GibbsMeasure::box_hi() const {
  std::vector<double> out;
  if (m1_) {
    auto& b = m1_->get_box();
    out.insert(out.end(), b.hi.begin(), b.hi.end());
  }
  if (m2_) {
    auto& b = m2_->get_box();
    out.insert(out.end(), b.hi.begin(), b.hi.end());
  }
  return out;
}

std::vector<double> GibbsMeasure::mode() const {
  std::vector<double> out;
  if (m1_) {
    auto& b = m1_->get_box();
    out.insert(out.end(), b.argmin.begin(), b.argmin.end());
  }
  if (m2_) {
    auto& b = m2_->get_box();
    out.insert(out.end(), b.argmin.begin(), b.argmin.end());
  }
  return out;
}

double normalize(const GibbsMeasure& mu) { return mu.log_normalization(); }

double integrate_against(const GibbsMeasure& mu, const Integrand& f, std::optional<double> rel_tol) {
  mu.log_normalization();
  const std::size_t n = mu.dim_total();
  Integrand g = [&](std::span<const double> p) {
    double w = mu.shifted_density(p);
    return w == 0.0 ? 0.0 : f(p) * w;
  };
  auto lo = mu.box_lo();
  auto hi = mu.box_hi();
  if (n <= 4) {
    double tol = rel_tol.value_or(n <= 2 ? mu.cfg_.rel_tol : std::max(mu.cfg_.rel_tol, 1e-7));
    return integrate_box(lo, hi, g, tol, mu.cfg_.max_depth);
  }
  std::vector<double> c = mu.mode();
  double half = 0.0;
  for (std::size_t k = 0; k < n; ++k) half = std::max(half, 0.5 * (hi[k] - lo[k]));
  return integrate_monte_carlo(n, c, half / 3.0, g, mu.cfg_).value;
}

double integrate_on_ball(const GibbsMeasure& mu, const Integrand& f, std::span<const double> center,
                         double radius) {
  mu.log_normalization();
  const std::size_t n = mu.dim_total();
  require(center.size() == n, ErrorKind::DimensionMismatch, "ball center dimension");
  require(n <= 4, ErrorKind::InvalidParameter, "ball quadrature supports up to 4 dimensions");
  Integrand g = [&](std::span<const double> p) {
    double w = mu.shifted_density(p);
    return w == 0.0 ? 0.0 : f(p) * w;
  };
  double tol = n <= 2 ? mu.cfg_.rel_tol : std::max(mu.cfg_.rel_tol, 1e-8);
  return integrate_ball(center, radius, g, tol, mu.cfg_.max_depth);
}

double weighted_l2_inner(const Integrand& f, const Integrand& g, const GibbsMeasure& mu) {
  return integrate_against(mu, [&](std::span<const double> p) { return f(p) * g(p); });
}

MomentResult moment(const GibbsMeasure& mu, MomentSelector sel) {
  const bool pos = sel.kind == MomentKind::PositionPower || sel.kind == MomentKind::GradPhi1;
  MomentResult res;
  if (pos ? !mu.has_position() : !mu.has_velocity()) {
    res.note = "measure lacks the required marginal";
    return res;
  }
  const PotentialSpec& phi = pos ? mu.phi1() : mu.phi2();
  const std::size_t d = phi.dim();
  const bool grad = sel.kind == MomentKind::GradPhi1 || sel.kind == MomentKind::GradPhi2;
  const double order = sel.order;
  auto weight = [&](std::span<const double> p) {
    double s = 0.0;
    if (grad) {
      std::array<double, kMaxDim> g{};
      phi.grad_at(p, std::span<double>(g.data(), d));
      for (std::size_t i = 0; i < d; ++i) s += g[i] * g[i];
    } else {
      for (std::size_t i = 0; i < d; ++i) s += p[i] * p[i];
    }
    return std::pow(s, 0.5 * order);
  };
  auto cfg = mu.quadrature_config();
  auto box = truncation_box(phi, cfg);
  if (!box) {
    res.note = "Gibbs weight not confined (infinite mass)";
    return res;
  }
  double log_z;
  try {
    GibbsMeasure marg = pos ? GibbsMeasure::position(phi, cfg) : GibbsMeasure::velocity(phi, cfg);
    log_z = marg.log_normalization();
  } catch (const Error& e) {
    res.note = e.what();
    return res;
  }
  Integrand f = [&](std::span<const double> p) {
    double v = phi.value_at(p);
    if (!std::isfinite(v)) return 0.0;
    double w = std::exp(box->min_value - v);
    if (w == 0.0) return 0.0;
    return weight(p) * w;
  };
  const double norm = std::exp(box->min_value + log_z);  // shifted mass
  if (d >= 3) {
    std::vector<double> c = box->argmin;
    double half = 0.0;
    for (std::size_t k = 0; k < d; ++k) half = std::max(half, 0.5 * (box->hi[k] - box->lo[k]));
    try {
      auto mc = integrate_monte_carlo(d, c, half / 3.0, f, cfg);
      res.finite = true;
      res.value = mc.value / norm;
      res.refinement_change = mc.rel_std_error;
      res.note = "importance-sampled Monte Carlo";
    } catch (const Error& e) {
      res.note = std::string("Monte Carlo did not converge: ") + e.what();
    }
    return res;
  }
  // Integrate over the truncation box scaled by 2, 4 and 8 about its centre.
  std::vector<double> vals;
  for (double s : {2.0, 4.0, 8.0}) {
    std::vector<double> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      double c = 0.5 * (box->lo[k] + box->hi[k]);
      double h = 0.5 * (box->hi[k] - box->lo[k]) * s;
      lo[k] = c - h;
      hi[k] = c + h;
    }
    double v;
    try {
      v = integrate_box(lo, hi, f, cfg.rel_tol, cfg.max_depth + 2);
    } catch (const Error& e) {
      res.note = e.what();
      return res;
    }
    vals.push_back(v);
  }
  double a = vals[1], b = vals[2];
  double change = std::abs(b - a) / std::max(std::abs(b), 1e-300);
  res.refinement_change = change;
  if (!std::isfinite(b) || change > 1e-5) {
    res.note = "integral changes by a relative " + std::to_string(change) +
               " under domain doubling (divergent)";
    return res;
  }
  res.finite = true;
  res.value = b / norm;
  return res;
}

// ---------------------------------------------------------------------------

InitialDistribution InitialDistribution::stationary(GibbsMeasure base) {
  InitialDistribution init(std::move(base));
  return init;
}

InitialDistribution InitialDistribution::weighted(GibbsMeasure base, DensityFn h_raw, std::string label,
                                                  std::optional<double> h_sup_raw,
                                                  std::vector<double> support_center,
                                                  double support_radius) {
  InitialDistribution init(std::move(base));
  init.label_ = std::move(label);
  double mass, m2;
  if (std::isfinite(support_radius)) {
    mass = integrate_on_ball(init.base_, h_raw, support_center, support_radius);
    m2 = integrate_on_ball(
        init.base_, [&](std::span<const double> p) { double h = h_raw(p); return h * h; },
        support_center, support_radius);
  } else {
    mass = integrate_against(init.base_, h_raw);
    m2 = integrate_against(init.base_, [&](std::span<const double> p) {
      double h = h_raw(p);
      return h * h;
    });
  }
  require(mass > 0 && std::isfinite(mass), ErrorKind::InvalidParameter,
          "initial density has zero or non-finite mass under the base measure");
  init.h_ = std::move(h_raw);
  init.mass_ = mass;
  init.scale_ = 1.0 / mass;
  init.l2_norm_ = std::sqrt(m2) / mass;
  if (h_sup_raw) init.h_sup_ = *h_sup_raw / mass;
  else init.h_sup_.reset();
  return init;
}

InitialDistribution InitialDistribution::position_interval(GibbsMeasure base, double lo, double hi) {
  require(base.has_position(), ErrorKind::InvalidParameter, "interval start needs a position marginal");
  require(hi > lo, ErrorKind::InvalidParameter, "empty start interval");
  GibbsMeasure pos = GibbsMeasure::position(base.phi1(), base.quadrature_config());
  pos.log_normalization();
  const std::size_t d = pos.d();
  auto blo = pos.box_lo();
  auto bhi = pos.box_hi();
  blo[0] = std::max(blo[0], lo);
  bhi[0] = std::min(bhi[0], hi);
  double z = std::exp(pos.log_normalization());
  double mass = 0.0;
  if (bhi[0] > blo[0]) {
    mass = integrate_box(blo, bhi, [&](std::span<const double> p) { return pos.unnormalized_density(p); },
                         1e-10) /
           z;
  }
  require(mass > 0, ErrorKind::InvalidParameter, "start interval has zero mass");
  InitialDistribution init(std::move(base));
  init.h_ = [lo, hi](std::span<const double> p) { return (p[0] >= lo && p[0] <= hi) ? 1.0 : 0.0; };
  init.mass_ = mass;
  init.scale_ = 1.0 / mass;
  init.l2_norm_ = std::sqrt(mass) / mass;
  init.h_sup_ = 1.0 / mass;
  init.label_ = "interval[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
  (void)d;
  return init;
}

InitialDistribution InitialDistribution::position_bump(GibbsMeasure base, std::vector<double> center,
                                                       double radius) {
  require(base.has_position(), ErrorKind::InvalidParameter, "bump start needs a position marginal");
  require(center.size() == base.d(), ErrorKind::DimensionMismatch, "bump center dimension");
  require(radius > 0, ErrorKind::InvalidParameter, "bump radius must be positive");
  GibbsMeasure pos = GibbsMeasure::position(base.phi1(), base.quadrature_config());
  const double r2 = radius * radius;
  auto bump = [center, r2](std::span<const double> p) {
    double s = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) s += (p[i] - center[i]) * (p[i] - center[i]);
    double u = 1.0 - s / r2;
    return u > 0 ? u * u * u * u : 0.0;
  };
  double mass = integrate_on_ball(pos, bump, center, radius);
  double m2 = integrate_on_ball(
      pos, [&](std::span<const double> p) { double b = bump(p); return b * b; }, center, radius);
  require(mass > 0, ErrorKind::InvalidParameter, "bump start has zero mass");
  InitialDistribution init(std::move(base));
  init.h_ = bump;
  init.mass_ = mass;
  init.scale_ = 1.0 / mass;
  init.l2_norm_ = std::sqrt(m2) / mass;
  init.h_sup_ = 1.0 / mass;
  init.label_ = "bump";
  return init;
}

double InitialDistribution::h(std::span<const double> p) const {
  return h_ ? scale_ * h_(p) : 1.0;
}

// ---------------------------------------------------------------------------

namespace {

struct Target {
  const InitialDistribution& init;
  std::size_t dim;
  std::size_t d;

  double log_pi(std::span<const double> p) const {
    double l = init.base().log_unnormalized_density(p);
    if (!std::isfinite(l)) return -kInf;
    if (!init.trivial()) {
      double h = init.h(p);
      if (!(h > 0)) return -kInf;
      l += std::log(h);
    }
    return l;
  }
  void grad_log(std::span<const double> p, std::span<double> g) const {
    const auto& mu = init.base();
    std::size_t off = 0;
    if (mu.has_position()) {
      mu.phi1().grad_at(p.subspan(0, d), g.subspan(0, d));
      off = d;
    }
    if (mu.has_velocity()) mu.phi2().grad_at(p.subspan(off, d), g.subspan(off, d));
    for (auto& x : g) x = std::isfinite(x) ? -x : 0.0;
  }
};

struct ChainResult {
  double acceptance;
  std::size_t thin;
  double step;
};

double lag_autocorr(const std::vector<double>& s, std::size_t lag) {
  const std::size_t n = s.size();
  double m = 0.0;
  for (double x : s) m += x;
  m /= n;
  double c0 = 0.0, ck = 0.0;
  for (std::size_t i = 0; i < n; ++i) c0 += (s[i] - m) * (s[i] - m);
  for (std::size_t i = 0; i + lag < n; ++i) ck += (s[i] - m) * (s[i + lag] - m);
  return c0 > 0 ? ck / c0 : 0.0;
}

ChainResult run_chain(const Target& t, const std::vector<double>& start, const std::vector<double>& scale,
                      std::uint64_t seed, std::size_t chunk, std::size_t count, double* out,
                      const SamplerOptions& opts) {
  const std::size_t n = t.dim;
  Rng rng(derive_seed(seed, "mala"), chunk);
  std::vector<double> x = start, y(n), gx(n), gy(n);
  double lx = t.log_pi(x);
  t.grad_log(x, gx);
  double tau = 1.0;
  std::size_t accepted = 0, total = 0;

  auto step = [&]() {
    const double h = 0.5 * tau * tau;
    for (std::size_t j = 0; j < n; ++j)
      y[j] = x[j] + h * scale[j] * scale[j] * gx[j] + tau * scale[j] * rng.normal();
    double u = rng.uniform();
    ++total;
    double ly = t.log_pi(y);
    if (!std::isfinite(ly)) return;
    t.grad_log(y, gy);
    double fwd = 0.0, bwd = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s2 = scale[j] * scale[j];
      double a = (y[j] - x[j] - h * s2 * gx[j]) / scale[j];
      double b = (x[j] - y[j] - h * s2 * gy[j]) / scale[j];
      fwd += a * a;
      bwd += b * b;
    }
    double log_alpha = ly - lx - (bwd - fwd) / (2.0 * tau * tau);
    if (std::log(u) < log_alpha) {
      std::swap(x, y);
      std::swap(gx, gy);
      lx = ly;
      ++accepted;
    }
  };

  // Burn-in with multiplicative step adaptation towards 0.4-0.6 acceptance.
  std::size_t win_acc = 0, win_tot = 0;
  for (std::size_t i = 0; i < opts.burn_in; ++i) {
    std::size_t a0 = accepted;
    step();
    win_acc += accepted - a0;
    ++win_tot;
    if (win_tot == 100) {
      double r = static_cast<double>(win_acc) / win_tot;
      if (r < 0.4) tau *= 0.8;
      else if (r > 0.6) tau *= 1.25;
      win_acc = win_tot = 0;
    }
  }
  // Pilot run fixes the thinning.
  accepted = total = 0;
  std::vector<std::vector<double>> series(n + 1, std::vector<double>(opts.pilot));
  for (std::size_t i = 0; i < opts.pilot; ++i) {
    step();
    double r2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      series[j][i] = x[j];
      r2 += x[j] * x[j];
    }
    series[n][i] = r2;
  }
  double acc = static_cast<double>(accepted) / static_cast<double>(total);
  if (acc < 0.001)
    fail(ErrorKind::SamplerStuck,
         "MALA rejection rate above 0.999 (singular or mis-scaled potential?)");
  std::size_t thin = opts.max_thin;
  for (std::size_t k = 1; k <= opts.max_thin; ++k) {
    bool ok = true;
    for (const auto& s : series) {
      if (std::abs(lag_autocorr(s, k)) >= 0.05) {
        ok = false;
        break;
      }
    }
    if (ok) {
      thin = k;
      break;
    }
  }
  accepted = total = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < thin; ++k) step();
    std::copy(x.begin(), x.end(), out + i * n);
  }
  acc = static_cast<double>(accepted) / static_cast<double>(total);
  if (acc < 0.001)
    fail(ErrorKind::SamplerStuck, "MALA chain stopped accepting during production");
  return {acc, thin, tau};
}

bool exact_gaussian(const InitialDistribution& init) {
  const auto& mu = init.base();
  if (!init.trivial()) return false;
  if (mu.has_position() && !mu.phi1().quadratic_stiffness()) return false;
  if (mu.has_velocity() && !mu.phi2().quadratic_stiffness()) return false;
  return true;
}

}  // namespace

std::vector<double> sample(const InitialDistribution& init, std::size_t n, std::uint64_t seed,
                           const SamplerOptions& opts, SamplerDiagnostics* diag) {
  require(n >= 1, ErrorKind::InvalidParameter, "sample size must be at least 1");
  const auto& mu = init.base();
  const std::size_t dim = mu.dim_total();
  const std::size_t d = mu.d();
  std::vector<double> out(n * dim);
  if (exact_gaussian(init)) {
    std::vector<double> sd(dim);
    std::size_t off = 0;
    if (mu.has_position()) {
      for (std::size_t i = 0; i < d; ++i) sd[i] = 1.0 / std::sqrt(*mu.phi1().quadratic_stiffness());
      off = d;
    }
    if (mu.has_velocity())
      for (std::size_t i = 0; i < d; ++i) sd[off + i] = 1.0 / std::sqrt(*mu.phi2().quadratic_stiffness());
    RandomStream rs(derive_seed(seed, "exact-gibbs"), 0);
    parallel_for(n, opts.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        std::span<double> row(out.data() + i * dim, dim);
        rs.normals(i, row);
        for (std::size_t j = 0; j < dim; ++j) row[j] *= sd[j];
      }
    });
    if (diag) *diag = {true, 1.0, 1, 0.0};
    return out;
  }

  Target t{init, dim, d};
  // Start at the best point of a coarse probe cloud inside the truncation box.
  auto lo = mu.box_lo();
  auto hi = mu.box_hi();
  std::vector<double> start = mu.mode();
  double best = t.log_pi(start);
  {
    Rng rng(derive_seed(seed, "mala-start"), 0);
    std::vector<double> p(dim);
    for (int i = 0; i < 20000; ++i) {
      for (std::size_t j = 0; j < dim; ++j) p[j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
      double l = t.log_pi(p);
      if (l > best) {
        best = l;
        start = p;
      }
    }
  }
  require(std::isfinite(best), ErrorKind::SamplerStuck,
          "no point of positive initial density found for the sampler");
  std::vector<double> scale(dim);
  for (std::size_t j = 0; j < dim; ++j) scale[j] = std::max((hi[j] - lo[j]) / 17.0, 1e-12);

  const std::size_t chunks = (n + opts.chunk - 1) / opts.chunk;
  std::vector<ChainResult> results(chunks);
  parallel_for(chunks, opts.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      std::size_t first = c * opts.chunk;
      std::size_t count = std::min(opts.chunk, n - first);
      results[c] = run_chain(t, start, scale, seed, c, count, out.data() + first * dim, opts);
    }
  });
  if (diag) {
    diag->exact = false;
    diag->acceptance = 0.0;
    diag->thin = 0;
    for (const auto& r : results) {
      diag->acceptance += r.acceptance / chunks;
      diag->thin = std::max(diag->thin, r.thin);
      diag->step = r.step;
    }
  }
  return out;
}

}  // namespace gshs
