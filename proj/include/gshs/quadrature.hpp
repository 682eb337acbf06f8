#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>

namespace gshs {

struct QuadratureConfig {
  double rel_tol = 1e-10;          // per-level Gauss-Kronrod tolerance
  unsigned max_depth = 12;         // bisection depth per level
  double truncation_log = 36.841361487904734;  // ln(1e16)
  double refine_rel = 1e-6;        // successive refinements must agree to this
  std::size_t mc_batch = 200000;
  std::size_t mc_max_samples = 20000000;
  double mc_rel_err = 1e-3;
  std::uint64_t mc_seed = 0x5eed;
};

using Integrand = std::function<double(std::span<const double>)>;
// Integration limits of coordinate k given coordinates 0..k-1.
using NestedLimits = std::function<std::pair<double, double>(std::size_t, std::span<const double>)>;

// Adaptive Gauss-Kronrod on [a, b]; a >= b gives 0.
double integrate_1d(const std::function<double(double)>& f, double a, double b, double rel_tol,
                    unsigned max_depth = 15, double* error_estimate = nullptr);

// Iterated adaptive Gauss-Kronrod over a region described coordinate by
// coordinate (box, ball chord, or any nested description).
double integrate_nested(std::size_t n, const NestedLimits& limits, const Integrand& f,
                        double rel_tol, unsigned max_depth = 12);

double integrate_box(std::span<const double> lo, std::span<const double> hi, const Integrand& f,
                     double rel_tol, unsigned max_depth = 12);

double integrate_ball(std::span<const double> center, double radius, const Integrand& f,
                      double rel_tol, unsigned max_depth = 12);

struct MonteCarloResult {
  double value = 0.0;
  double rel_std_error = 0.0;
  std::size_t samples = 0;
};

// Importance sampling with an isotropic Gaussian proposal N(center, scale^2 I),
// batched until the relative standard error reaches cfg.mc_rel_err.
MonteCarloResult integrate_monte_carlo(std::size_t n, std::span<const double> center, double scale,
                                       const Integrand& f, const QuadratureConfig& cfg);

}  // namespace gshs
