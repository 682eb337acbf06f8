#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gshs {

inline constexpr std::size_t kMaxDim = 16;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A potential on R^d, +inf on its singular set.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual double value(std::span<const double> p) const = 0;
  virtual void gradient(std::span<const double> p, std::span<double> g) const = 0;
  virtual void hessian_diag(std::span<const double> p, std::span<double> h) const = 0;
  virtual double laplacian(std::span<const double> p) const;
  virtual bool finite_domain(std::span<const double> p) const { return std::isfinite(value(p)); }
  // Distance hint to the singular set, +inf for smooth potentials.
  virtual double distance_to_singularity(std::span<const double>) const { return kInf; }
  virtual bool singular() const { return false; }
  // Certified constant C with value >= C; -inf when none is known.
  virtual double lower_bound() const = 0;
  virtual bool symmetric() const = 0;
  // k when the potential is k|p|^2/2 + const (exact OU substeps use it).
  virtual std::optional<double> quadratic_stiffness() const { return std::nullopt; }
};

// Shared immutable handle; cheap to copy across workers.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  explicit PotentialSpec(std::shared_ptr<const Potential> impl) : impl_(std::move(impl)) {}

  explicit operator bool() const { return static_cast<bool>(impl_); }
  const Potential& impl() const { return *impl_; }
  std::size_t dim() const { return impl_->dim(); }
  std::string name() const { return impl_->name(); }
  double value_at(std::span<const double> p) const { return impl_->value(p); }
  void grad_at(std::span<const double> p, std::span<double> g) const { impl_->gradient(p, g); }
  std::vector<double> grad_at(std::span<const double> p) const {
    std::vector<double> g(dim());
    impl_->gradient(p, g);
    return g;
  }
  void hessian_diag_at(std::span<const double> p, std::span<double> h) const {
    impl_->hessian_diag(p, h);
  }
  double laplacian_at(std::span<const double> p) const { return impl_->laplacian(p); }
  bool finite_domain(std::span<const double> p) const { return impl_->finite_domain(p); }
  double distance_to_singularity(std::span<const double> p) const {
    return impl_->distance_to_singularity(p);
  }
  bool singular() const { return impl_->singular(); }
  double lower_bound() const { return impl_->lower_bound(); }
  bool symmetric() const { return impl_->symmetric(); }
  std::optional<double> quadratic_stiffness() const { return impl_->quadratic_stiffness(); }

 private:
  std::shared_ptr<const Potential> impl_;
};

// k|x|^2 / 2
PotentialSpec make_quadratic(std::size_t dim, double k = 1.0);
// c|x|^4 / 4
PotentialSpec make_quartic(std::size_t dim, double c = 1.0);
// a(|x|^2 - 1)^2
PotentialSpec make_double_well(std::size_t dim, double a = 1.0);
// s(r^-12 - r^-6) + c r^2/2 with r = x > 0 (d = 1) or r = |x| > 0 (d = 2).
PotentialSpec make_lennard_jones(std::size_t dim, double strength = 1.0, double confinement = 1.0);
// slope * (x_1 + ... + x_d); unbounded below for slope != 0.
PotentialSpec make_linear(std::size_t dim, double slope = -1.0);
// Identically zero (no confinement; infinite Gibbs mass).
PotentialSpec make_zero(std::size_t dim);

struct ExpressionOptions {
  double lower_bound = -kInf;
  bool symmetric = false;
  // Treat the origin as singular (distance hint |x|) when the expression
  // blows up there, e.g. r^-12.
  bool singular_at_origin = false;
};

// Custom potential from the expression grammar documented in README.md.
// Variables: x (d = 1), x1..xd, r = |x|. Operators + - * / ^, functions
// exp, log, sqrt, abs. Derivatives are exact (forward-mode jets).
PotentialSpec make_expression(std::size_t dim, const std::string& expr,
                              const ExpressionOptions& opts = {});

// phi2^eps(v) = phi2(v / eps) + d ln(eps)
PotentialSpec scale_velocity_potential(const PotentialSpec& phi2, double eps);

// Registry used by the config layer. Unknown kinds and parameters throw
// invalid-parameter with the offending name.
struct PotentialDecl {
  std::string kind;
  std::size_t dim = 1;
  std::map<std::string, double> params;
  std::string expr;
  bool symmetric = false;
  bool singular_at_origin = false;

  bool operator==(const PotentialDecl&) const = default;
};
PotentialSpec make_potential(const PotentialDecl& decl);
const std::vector<std::string>& potential_kinds();

// Growth condition |Laplacian| <= K (1 + |grad|^alpha).
struct GrowthConstants {
  double K = 1.0;
  double alpha = 1.0;
};

struct GrowthReport {
  bool verified = false;
  double max_violation = -kInf;
  std::vector<double> worst_point;
};

GrowthReport check_growth_condition(const PotentialSpec& phi2, const GrowthConstants& gc,
                                    std::span<const std::vector<double>> probe_points);

}  // namespace gshs
