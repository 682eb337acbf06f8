#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gshs/dynamics.hpp"
#include "gshs/martingale.hpp"

namespace gshs {

// Stacked (X_{t_1}, ..., X_{t_k}) per path.
struct FddSample {
  std::vector<double> times;
  std::size_t dim = 0;  // k * d
  std::size_t n = 0;
  std::vector<double> data;  // n x dim
  std::string label;

  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

// Positions of every path at the given recorded times.
FddSample position_fdd(const PathEnsemble& paths, const std::vector<double>& times, std::string label = "");
FddSample make_fdd(std::vector<double> times, std::size_t dim, std::vector<double> data, std::string label);

struct EnergyOptions {
  std::size_t permutations = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  // Pooled sizes above this use the projection form of the statistic.
  std::size_t exact_limit = 2000;
  std::size_t directions = 64;  // p = 2 uses equispaced half-circle directions
};

struct EnergyResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t permutations = 0;
  bool exact = true;
};

// V-statistic 2E|A-B| - E|A-A'| - E|B-B'| with a permutation p-value
// (1 + #{perm >= observed}) / (1 + permutations).
EnergyResult energy_distance(const FddSample& a, const FddSample& b, const EnergyOptions& opts = {});

// m((x,v),(x~,v~)) = sum_i |f_i - f~_i| + |g_i - g~_i| with f_i = x_i + v_i, g_i = v_i.
struct PathMetricConfig {
  std::size_t d = 1;
  double operator()(std::span<const double> a, std::span<const double> b) const;
};

// F_s-measurable weight for the martingale battery.
struct MartingaleWeight {
  std::string name;
  std::function<double(std::span<const double> state, double m_s)> fn;
};

// {1, tanh(X_s), tanh(V_s) (phase space only), tanh(M_s)} on the first coordinate.
std::vector<MartingaleWeight> default_weights(bool has_velocity);

struct ZScore {
  double s = 0.0, t = 0.0;
  std::string weight;
  double z = 0.0;
  bool skipped = false;
  std::string note;
};

// z = mean(w_s (M_t - M_s)) / standard error, for each pair and weight.
std::vector<ZScore> martingale_zscores(const PathSeries& M, const PathEnsemble& paths,
                                       const std::vector<std::pair<double, double>>& pairs,
                                       const std::vector<MartingaleWeight>& weights);
double max_abs_z(const std::vector<ZScore>& zs);

struct QvCurve {
  std::vector<double> times;
  std::vector<double> qv;       // path mean of sum (dM)^2 up to t
  std::vector<double> lo, hi;   // +- 3 standard errors
  std::vector<double> compensator;  // path mean of the compensator, if supplied
  double max_gap = 0.0;             // max_t |qv - compensator|
  std::vector<std::string> warnings;
};

QvCurve empirical_quadratic_variation(const PathSeries& M, const PathSeries* compensator = nullptr);
// Path mean of sum dM1 dM2 up to each recorded time.
QvCurve empirical_cross_variation(const PathSeries& M1, const PathSeries& M2);

enum class CoordinateTransform { F, G };  // f_i = x_i + v_i, g_i = v_i

struct IncrementDiagnostic {
  std::vector<double> lags;
  std::vector<double> moments;  // E (M_{s+lag} - M_s)^order, pooled over s
  double exponent = 0.0;        // log-log slope
  double constant = 0.0;        // mean of moment / lag^(order/2)
  std::size_t samples = 0;
};

// Fourth-moment increments of M^[f_i] or M^[g_i] for the process mapped to
// (x, eps v) under the eps = 1 generator of (Phi1, Phi2^eps).
IncrementDiagnostic increment_moment_diagnostic(const PathEnsemble& paths, const PotentialSpec& phi1,
                                                const PotentialSpec& phi2, CoordinateTransform tr,
                                                std::size_t coord, const std::vector<double>& lags,
                                                int order = 4);

struct DriftBoundRow {
  double lag = 0.0;
  double lhs = 0.0;     // E (int_s^t L f_i dr)^2
  double lhs_se = 0.0;
  double rhs = 0.0;     // lag^2 * int |d_i Phi1|^2 d mu_{Phi1}
  bool ok = false;      // lhs <= rhs + 3 lhs_se
};

std::vector<DriftBoundRow> drift_bound_diagnostic(const PathEnsemble& paths, const PotentialSpec& phi1,
                                                  const PotentialSpec& phi2, std::size_t coord,
                                                  const std::vector<double>& lags);

// (x, v) -> (x, v / eps) on every recorded state: maps paths of the eps = 1
// equation with Phi2^eps onto paths of the eps-scaled equation with Phi2.
PathEnsemble rescale_ensemble(const PathEnsemble& paths, double eps);
// (x, v) -> (x, eps v), the inverse map.
PathEnsemble to_scaled_kinetic_frame(const PathEnsemble& paths, double eps);

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Sample mean of f(Z_t) with its standard error.
Estimate semigroup_estimate(const PathEnsemble& paths, const TestFunction& f, double t);

// Kolmogorov-Smirnov statistic sup|F_n - F| and the asymptotic 1% critical value.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_critical_1pct(std::size_t n);
// Anderson-Darling A^2 against a fully specified continuous CDF; 1% critical value 3.857.
double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf);
inline constexpr double kAndersonDarling1pct = 3.857;

double normal_cdf(double x);

}  // namespace gshs
