#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gshs/potentials.hpp"
#include "gshs/quadrature.hpp"

namespace gshs {

// Box outside of which e^{-phi} is below 1e-16 of its maximum.
struct TruncationBox {
  std::vector<double> lo, hi;
  double min_value = 0.0;
  std::vector<double> argmin;
};

// nullopt when the sublevel set keeps growing with the probe region,
// i.e. e^{-phi} is not confined (no finite Gibbs mass).
std::optional<TruncationBox> truncation_box(const PotentialSpec& phi, const QuadratureConfig& cfg = {});

// Gibbs measure with density e^{-phi1(x) - phi2(v)}, or a single marginal.
// Normalization is computed lazily once and shared by copies.
class GibbsMeasure {
 public:
  static GibbsMeasure joint(PotentialSpec phi1, PotentialSpec phi2, QuadratureConfig cfg = {});
  static GibbsMeasure position(PotentialSpec phi1, QuadratureConfig cfg = {});
  static GibbsMeasure velocity(PotentialSpec phi2, QuadratureConfig cfg = {});

  bool has_position() const { return static_cast<bool>(phi1_); }
  bool has_velocity() const { return static_cast<bool>(phi2_); }
  const PotentialSpec& phi1() const { return phi1_; }
  const PotentialSpec& phi2() const { return phi2_; }
  std::size_t d() const;
  std::size_t dim_total() const;
  std::string label() const;
  const QuadratureConfig& quadrature_config() const { return cfg_; }

  // Point layout: (x, v) for joint, x or v for marginals.
  double log_unnormalized_density(std::span<const double> p) const;
  double unnormalized_density(std::span<const double> p) const;
  double log_normalization() const;
  double density(std::span<const double> p) const;

  // Truncated integration box of the full state.
  std::vector<double> box_lo() const;
  std::vector<double> box_hi() const;
  // Point of maximal density (per marginal argmin of the potentials).
  std::vector<double> mode() const;

  struct Marginal;

 private:
  GibbsMeasure(PotentialSpec phi1, PotentialSpec phi2, QuadratureConfig cfg);
  const Marginal& m1() const { return *m1_; }
  const Marginal& m2() const { return *m2_; }
  double shifted_density(std::span<const double> p) const;
  PotentialSpec phi1_, phi2_;
  QuadratureConfig cfg_;
  std::shared_ptr<Marginal> m1_, m2_;
  friend double integrate_against(const GibbsMeasure&, const Integrand&, std::optional<double>);
  friend double integrate_on_ball(const GibbsMeasure&, const Integrand&, std::span<const double>,
                                  double);
};

double normalize(const GibbsMeasure& mu);

// Normalized expectation of f over the truncated domain of mu.
// Nested Gauss-Kronrod for dim_total <= 4, importance-sampled Monte Carlo above.
// rel_tol overrides the configured Gauss-Kronrod tolerance.
double integrate_against(const GibbsMeasure& mu, const Integrand& f,
                         std::optional<double> rel_tol = std::nullopt);

// Normalized integral of f over the ball B(center, radius) (f is assumed to
// vanish outside it). Used for compactly supported test functions.
double integrate_on_ball(const GibbsMeasure& mu, const Integrand& f, std::span<const double> center,
                         double radius);

double weighted_l2_inner(const Integrand& f, const Integrand& g, const GibbsMeasure& mu);

enum class MomentKind { PositionPower, VelocityPower, GradPhi1, GradPhi2 };
struct MomentSelector {
  MomentKind kind;
  int order;  // 2k for the power moments, p for gradient moments
};

struct MomentResult {
  bool finite = false;
  double value = kInf;
  double refinement_change = 0.0;
  std::string note;
};

// Normalized moment over the relevant marginal. Divergence is reported,
// not thrown.
MomentResult moment(const GibbsMeasure& mu, MomentSelector sel);

using DensityFn = std::function<double(std::span<const double>)>;

// h * mu with h a probability density w.r.t. the normalized base measure.
class InitialDistribution {
 public:
  static InitialDistribution stationary(GibbsMeasure base);
  // h_raw >= 0 is normalized here. h_sup_raw, when known, certifies sup h_raw.
  // support_center/radius restrict the quadrature when h_raw has compact support.
  static InitialDistribution weighted(GibbsMeasure base, DensityFn h_raw, std::string label,
                                      std::optional<double> h_sup_raw = std::nullopt,
                                      std::vector<double> support_center = {},
                                      double support_radius = kInf);
  // h proportional to 1{lo <= x_1 <= hi}.
  static InitialDistribution position_interval(GibbsMeasure base, double lo, double hi);
  // h proportional to a polynomial bump (1 - |x - c|^2/r^2)^4 in the position.
  static InitialDistribution position_bump(GibbsMeasure base, std::vector<double> center,
                                           double radius);

  const GibbsMeasure& base() const { return base_; }
  bool trivial() const { return !h_; }
  double h(std::span<const double> p) const;
  double l2_norm_h() const { return l2_norm_; }
  // Certified sup of h, if known.
  std::optional<double> h_sup() const { return h_sup_; }
  const std::string& label() const { return label_; }
  double mass() const { return mass_; }

 private:
  explicit InitialDistribution(GibbsMeasure base) : base_(std::move(base)) {}
  GibbsMeasure base_;
  DensityFn h_;
  double scale_ = 1.0;
  double mass_ = 1.0;
  double l2_norm_ = 1.0;
  std::optional<double> h_sup_ = 1.0;
  std::string label_ = "stationary";
};

struct SamplerOptions {
  std::size_t burn_in = 10000;
  std::size_t chunk = 4096;
  std::size_t pilot = 4000;
  std::size_t max_thin = 200;
  std::size_t workers = 1;
};

struct SamplerDiagnostics {
  bool exact = false;
  double acceptance = 1.0;
  std::size_t thin = 1;
  double step = 0.0;
};

// n points, row-major (n x dim_total). Exact for h = 1 over quadratic
// potentials, MALA chains otherwise (one chain per fixed-size chunk, keyed
// by (seed, chunk)), so the output does not depend on the worker count.
std::vector<double> sample(const InitialDistribution& init, std::size_t n, std::uint64_t seed,
                           const SamplerOptions& opts = {}, SamplerDiagnostics* diag = nullptr);

}  // namespace gshs
