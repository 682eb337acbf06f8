#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gshs/dynamics.hpp"
#include "gshs/report.hpp"
#include "gshs/stats.hpp"

namespace gshs {

// Position density h w.r.t. mu_{Phi1}; the velocity factor is always 1.
struct InitialDecl {
  std::string kind = "stationary";  // stationary | interval | bump
  double lo = -1.0, hi = 1.0;       // interval
  std::vector<double> center;       // bump
  double radius = 1.0;              // bump

  bool operator==(const InitialDecl&) const = default;
};

// h * base, with h depending on the position only.
InitialDistribution make_initial(const InitialDecl& decl, GibbsMeasure base);

// Largest 0.01 / 2^k (k >= 0) that is <= eps^2 / 10.
double dyadic_step(double eps);

struct LimitOptions {
  std::vector<double> eps_grid{0.4, 0.2, 0.1};
  std::vector<double> times{0.5, 1.0};
  std::size_t n_paths = 50000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::size_t permutations = 200;
  InitialDecl initial;
  double record_dt = 0.01;
  // Euler step of the simulated reference when Phi1 is not quadratic.
  double reference_dt = 1e-3;
  // Negative control: drop the compensator in the per-eps martingale battery.
  bool no_compensator = false;
  std::size_t battery_paths = 10000;
};

// Energy distance of the position f.d.d. of the eps-scaled equation to the
// overdamped limit, per eps. All eps share one Brownian grid and one initial
// sample (x, v) with v ~ mu_{Phi2}. The reference is the exact OU law for
// quadratic Phi1, otherwise an independent Euler-Maruyama ensemble of the
// overdamped equation. Each eps also runs a martingale battery on
// x_1 + eps v_1, whose generator value is -d_1 Phi1.
ConvergenceReport overdamped_limit_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                              const LimitOptions& opts);

struct MartingaleExperimentOptions {
  double eps = 1.0;
  double t_end = 1.0;
  double dt = 1e-3;
  double record_dt = 0.01;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::vector<std::pair<double, double>> pairs{{0.25, 0.75}};
  bool no_compensator = false;
  // Separate fine-grid run for M^[f_1 - g_1] (recorded every step).
  std::size_t identity_paths = 1000;
  double identity_dt = 2.5e-4;
};

struct MartingaleExperimentResult {
  ConvergenceReport report;  // rows: t, qv_g1, qv_lo, qv_hi, compensator_g1[, cross_g1g2]
  std::vector<ZScore> zscores;
  std::vector<std::string> zscore_functions;  // function name per z-score
};

// Stationary paths mapped to (x, eps v), where f_i and g_i have carre du
// champ 2 under the eps = 1 generator of (Phi1, Phi2^eps).
MartingaleExperimentResult martingale_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                                 const MartingaleExperimentOptions& opts);

struct TightnessOptions {
  std::vector<double> eps_grid{0.5, 0.2, 0.1};
  std::vector<double> lags{0.05, 0.1, 0.2, 0.4};
  std::size_t n_paths = 4000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  double t_end = 1.0;
};

// Fourth-moment increment fits for M^[f_1], M^[g_1] and the drift bound, per eps.
ConvergenceReport tightness_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                       const TightnessOptions& opts);

struct RescalingOptions {
  std::vector<double> eps_grid{0.5, 0.2};
  std::vector<double> times{0.5, 1.0};
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::size_t permutations = 200;
  double record_dt = 0.01;
};

// Paths of the eps = 1 equation with (Phi1, Phi2^eps), mapped by
// (x, v) -> (x, v / eps), against independent paths of the eps-scaled
// equation with (Phi1, Phi2).
ConvergenceReport rescaling_experiment(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                       const RescalingOptions& opts);

}  // namespace gshs
