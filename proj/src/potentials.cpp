#include "gshs/potentials.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "gshs/error.hpp"

namespace gshs {

double Potential::laplacian(std::span<const double> p) const {
  std::array<double, kMaxDim> h{};
  hessian_diag(p, std::span<double>(h.data(), dim()));
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += h[i];
  return s;
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double norm2(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return s;
}

void check_dim(std::size_t dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::InvalidParameter,
          "potential dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

class Quadratic final : public Potential {
 public:
  Quadratic(std::size_t d, double k) : d_(d), k_(k) {}
  std::size_t dim() const override { return d_; }
  std::string name() const override { return "quadratic(k=" + fmt_num(k_) + ")"; }
  double value(std::span<const double> p) const override { return 0.5 * k_ * norm2(p); }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    for (std::size_t i = 0; i < d_; ++i) g[i] = k_ * p[i];
  }
  void hessian_diag(std::span<const double>, std::span<double> h) const override {
    for (std::size_t i = 0; i < d_; ++i) h[i] = k_;
  }
  double laplacian(std::span<const double>) const override { return k_ * static_cast<double>(d_); }
  double lower_bound() const override { return 0.0; }
  bool symmetric() const override { return true; }
  std::optional<double> quadratic_stiffness() const override { return k_; }

 private:
  std::size_t d_;
  double k_;
};

class Quartic final : public Potential {
 public:
  Quartic(std::size_t d, double c) : d_(d), c_(c) {}
  std::size_t dim() const override { return d_; }
  std::string name() const override { return "quartic(c=" + fmt_num(c_) + ")"; }
  double value(std::span<const double> p) const override {
    double r2 = norm2(p);
    return 0.25 * c_ * r2 * r2;
  }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    double r2 = norm2(p);
    for (std::size_t i = 0; i < d_; ++i) g[i] = c_ * r2 * p[i];
  }
  void hessian_diag(std::span<const double> p, std::span<double> h) const override {
    double r2 = norm2(p);
    for (std::size_t i = 0; i < d_; ++i) h[i] = c_ * (r2 + 2.0 * p[i] * p[i]);
  }
  double laplacian(std::span<const double> p) const override {
    return c_ * static_cast<double>(d_ + 2) * norm2(p);
  }
  double lower_bound() const override { return 0.0; }
  bool symmetric() const override { return true; }

 private:
  std::size_t d_;
  double c_;
};

class DoubleWell final : public Potential {
 public:
  DoubleWell(std::size_t d, double a) : d_(d), a_(a) {}
  std::size_t dim() const override { return d_; }
  std::string name() const override { return "double-well(a=" + fmt_num(a_) + ")"; }
  double value(std::span<const double> p) const override {
    double s = norm2(p) - 1.0;
    return a_ * s * s;
  }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    double s = norm2(p) - 1.0;
    for (std::size_t i = 0; i < d_; ++i) g[i] = 4.0 * a_ * s * p[i];
  }
  void hessian_diag(std::span<const double> p, std::span<double> h) const override {
    double s = norm2(p) - 1.0;
    for (std::size_t i = 0; i < d_; ++i) h[i] = 4.0 * a_ * s + 8.0 * a_ * p[i] * p[i];
  }
  double lower_bound() const override { return 0.0; }
  bool symmetric() const override { return true; }

 private:
  std::size_t d_;
  double a_;
};

class LennardJones final : public Potential {
 public:
  LennardJones(std::size_t d, double s, double c) : d_(d), s_(s), c_(c) {}
  std::size_t dim() const override { return d_; }
  std::string name() const override {
    return "lennard-jones(strength=" + fmt_num(s_) + ",confinement=" + fmt_num(c_) + ")";
  }
  double value(std::span<const double> p) const override {
    double r = radius(p);
    if (!(r > 0.0)) return kInf;
    double r6 = 1.0 / (r * r * r * r * r * r);
    return s_ * (r6 * r6 - r6) + 0.5 * c_ * r * r;
  }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    double r = radius(p);
    double fp = dradial(r);
    if (d_ == 1) {
      g[0] = fp;
    } else {
      for (std::size_t i = 0; i < d_; ++i) g[i] = fp * p[i] / r;
    }
  }
  void hessian_diag(std::span<const double> p, std::span<double> h) const override {
    double r = radius(p);
    double fp = dradial(r);
    double fpp = d2radial(r);
    if (d_ == 1) {
      h[0] = fpp;
      return;
    }
    for (std::size_t i = 0; i < d_; ++i) {
      double u = p[i] / r;
      h[i] = fpp * u * u + fp * (1.0 - u * u) / r;
    }
  }
  double laplacian(std::span<const double> p) const override {
    double r = radius(p);
    return d2radial(r) + (d_ == 1 ? 0.0 : static_cast<double>(d_ - 1) * dradial(r) / r);
  }
  bool finite_domain(std::span<const double> p) const override { return radius(p) > 0.0; }
  double distance_to_singularity(std::span<const double> p) const override {
    return std::max(0.0, radius(p));
  }
  bool singular() const override { return true; }
  double lower_bound() const override { return -0.25 * s_; }
  bool symmetric() const override { return d_ >= 2; }

 private:
  // d = 1 uses the signed coordinate so that x <= 0 is outside the domain.
  double radius(std::span<const double> p) const {
    return d_ == 1 ? p[0] : std::sqrt(norm2(p));
  }
  double dradial(double r) const {
    double r2 = r * r;
    double r6 = 1.0 / (r2 * r2 * r2);
    return s_ * (-12.0 * r6 * r6 + 6.0 * r6) / r + c_ * r;
  }
  double d2radial(double r) const {
    double r2 = r * r;
    double r6 = 1.0 / (r2 * r2 * r2);
    return s_ * (156.0 * r6 * r6 - 42.0 * r6) / r2 + c_;
  }
  std::size_t d_;
  double s_;
  double c_;
};

class Linear final : public Potential {
 public:
  Linear(std::size_t d, double slope) : d_(d), slope_(slope) {}
  std::size_t dim() const override { return d_; }
  std::string name() const override { return "linear(slope=" + fmt_num(slope_) + ")"; }
  double value(std::span<const double> p) const override {
    double s = 0.0;
    for (double x : p) s += x;
    return slope_ * s;
  }
  void gradient(std::span<const double>, std::span<double> g) const override {
    for (std::size_t i = 0; i < d_; ++i) g[i] = slope_;
  }
  void hessian_diag(std::span<const double>, std::span<double> h) const override {
    for (std::size_t i = 0; i < d_; ++i) h[i] = 0.0;
  }
  double lower_bound() const override { return slope_ == 0.0 ? 0.0 : -kInf; }
  bool symmetric() const override { return slope_ == 0.0; }

 private:
  std::size_t d_;
  double slope_;
};

class Scaled final : public Potential {
 public:
  Scaled(PotentialSpec base, double eps)
      : base_(std::move(base)), eps_(eps), shift_(static_cast<double>(base_.dim()) * std::log(eps)) {}
  std::size_t dim() const override { return base_.dim(); }
  std::string name() const override { return base_.name() + "@eps=" + fmt_num(eps_); }
  double value(std::span<const double> p) const override {
    auto u = unscale(p);
    return base_.value_at(std::span<const double>(u.data(), dim())) + shift_;
  }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    auto u = unscale(p);
    base_.grad_at(std::span<const double>(u.data(), dim()), g);
    for (std::size_t i = 0; i < dim(); ++i) g[i] /= eps_;
  }
  void hessian_diag(std::span<const double> p, std::span<double> h) const override {
    auto u = unscale(p);
    base_.hessian_diag_at(std::span<const double>(u.data(), dim()), h);
    for (std::size_t i = 0; i < dim(); ++i) h[i] /= eps_ * eps_;
  }
  double laplacian(std::span<const double> p) const override {
    auto u = unscale(p);
    return base_.laplacian_at(std::span<const double>(u.data(), dim())) / (eps_ * eps_);
  }
  bool finite_domain(std::span<const double> p) const override {
    auto u = unscale(p);
    return base_.finite_domain(std::span<const double>(u.data(), dim()));
  }
  double distance_to_singularity(std::span<const double> p) const override {
    auto u = unscale(p);
    return eps_ * base_.distance_to_singularity(std::span<const double>(u.data(), dim()));
  }
  bool singular() const override { return base_.singular(); }
  double lower_bound() const override { return base_.lower_bound() + shift_; }
  bool symmetric() const override { return base_.symmetric(); }
  std::optional<double> quadratic_stiffness() const override {
    auto k = base_.quadratic_stiffness();
    if (!k) return std::nullopt;
    return *k / (eps_ * eps_);
  }

 private:
  std::array<double, kMaxDim> unscale(std::span<const double> p) const {
    std::array<double, kMaxDim> u{};
    for (std::size_t i = 0; i < dim(); ++i) u[i] = p[i] / eps_;
    return u;
  }
  PotentialSpec base_;
  double eps_;
  double shift_;
};

double param(const PotentialDecl& decl, const std::string& key, double fallback) {
  auto it = decl.params.find(key);
  return it == decl.params.end() ? fallback : it->second;
}

void allow_params(const PotentialDecl& decl, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : decl.params) {
    bool ok = std::any_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; });
    require(ok, ErrorKind::InvalidParameter,
            "unknown parameter '" + k + "' for potential kind '" + decl.kind + "'");
  }
}

}  // namespace

PotentialSpec make_quadratic(std::size_t dim, double k) {
  check_dim(dim);
  require(k > 0, ErrorKind::InvalidParameter, "quadratic stiffness k must be positive");
  return PotentialSpec(std::make_shared<Quadratic>(dim, k));
}

PotentialSpec make_quartic(std::size_t dim, double c) {
  check_dim(dim);
  require(c > 0, ErrorKind::InvalidParameter, "quartic coefficient c must be positive");
  return PotentialSpec(std::make_shared<Quartic>(dim, c));
}

PotentialSpec make_double_well(std::size_t dim, double a) {
  check_dim(dim);
  require(a > 0, ErrorKind::InvalidParameter, "double-well height a must be positive");
  return PotentialSpec(std::make_shared<DoubleWell>(dim, a));
}

PotentialSpec make_lennard_jones(std::size_t dim, double strength, double confinement) {
  require(dim == 1 || dim == 2, ErrorKind::InvalidParameter,
          "Lennard-Jones potential is defined for d = 1 and d = 2");
  require(strength > 0 && confinement >= 0, ErrorKind::InvalidParameter,
          "Lennard-Jones needs strength > 0 and confinement >= 0");
  return PotentialSpec(std::make_shared<LennardJones>(dim, strength, confinement));
}

PotentialSpec make_linear(std::size_t dim, double slope) {
  check_dim(dim);
  return PotentialSpec(std::make_shared<Linear>(dim, slope));
}

PotentialSpec make_zero(std::size_t dim) { return make_linear(dim, 0.0); }

PotentialSpec scale_velocity_potential(const PotentialSpec& phi2, double eps) {
  require(static_cast<bool>(phi2), ErrorKind::InvalidParameter, "cannot scale an empty potential");
  require(eps > 0 && std::isfinite(eps), ErrorKind::InvalidParameter,
          "velocity scaling needs eps > 0");
  return PotentialSpec(std::make_shared<Scaled>(phi2, eps));
}

const std::vector<std::string>& potential_kinds() {
  static const std::vector<std::string> kinds = {"quadratic",      "quartic", "double-well",
                                                 "lennard-jones",  "linear",  "zero",
                                                 "expression"};
  return kinds;
}

PotentialSpec make_potential(const PotentialDecl& decl) {
  const auto& k = decl.kind;
  if (k == "quadratic") {
    allow_params(decl, {"k"});
    return make_quadratic(decl.dim, param(decl, "k", 1.0));
  }
  if (k == "quartic") {
    allow_params(decl, {"c"});
    return make_quartic(decl.dim, param(decl, "c", 1.0));
  }
  if (k == "double-well") {
    allow_params(decl, {"a"});
    return make_double_well(decl.dim, param(decl, "a", 1.0));
  }
  if (k == "lennard-jones") {
    allow_params(decl, {"strength", "confinement"});
    return make_lennard_jones(decl.dim, param(decl, "strength", 1.0), param(decl, "confinement", 1.0));
  }
  if (k == "linear") {
    allow_params(decl, {"slope"});
    return make_linear(decl.dim, param(decl, "slope", -1.0));
  }
  if (k == "zero") {
    allow_params(decl, {});
    return make_zero(decl.dim);
  }
  if (k == "expression") {
    allow_params(decl, {"lower_bound"});
    ExpressionOptions o;
    o.lower_bound = param(decl, "lower_bound", -kInf);
    o.symmetric = decl.symmetric;
    o.singular_at_origin = decl.singular_at_origin;
    return make_expression(decl.dim, decl.expr, o);
  }
  fail(ErrorKind::InvalidParameter, "unknown potential kind '" + k + "'");
}

GrowthReport check_growth_condition(const PotentialSpec& phi2, const GrowthConstants& gc,
                                    std::span<const std::vector<double>> probe_points) {
  require(!probe_points.empty(), ErrorKind::InvalidParameter, "growth check needs probe points");
  require(gc.K > 0 && gc.alpha >= 1.0 && gc.alpha < 2.0, ErrorKind::InvalidParameter,
          "growth constants need K > 0 and alpha in [1, 2)");
  GrowthReport rep;
  std::array<double, kMaxDim> g{};
  for (const auto& p : probe_points) {
    require(p.size() == phi2.dim(), ErrorKind::DimensionMismatch, "probe point dimension");
    require(phi2.finite_domain(p), ErrorKind::DomainViolation,
            "growth probe outside the finite domain");
    phi2.grad_at(p, std::span<double>(g.data(), phi2.dim()));
    double gn = std::sqrt(norm2(std::span<const double>(g.data(), phi2.dim())));
    double viol = std::abs(phi2.laplacian_at(p)) - gc.K * (1.0 + std::pow(gn, gc.alpha));
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      rep.worst_point = p;
    }
  }
  rep.verified = rep.max_violation <= 0.0;
  return rep;
}

}  // namespace gshs
