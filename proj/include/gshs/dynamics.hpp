#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gshs/measures.hpp"
#include "gshs/potentials.hpp"

namespace gshs {

enum class Scheme { EulerMaruyama, Splitting };
enum class Guard { None, RejectStep, ShrinkStep };

const char* to_string(Scheme s);
const char* to_string(Guard g);
Scheme parse_scheme(const std::string& s);
Guard parse_guard(const std::string& s);

struct SdeConfig {
  double eps = 1.0;
  double t_end = 1.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::Splitting;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  Guard guard = Guard::ShrinkStep;
  double guard_distance = 0.05;
  std::size_t record_stride = 1;
  // Brownian increments are drawn on a grid of this spacing (0: one draw per
  // step). Runs that share noise_dt and seed see the same Brownian path.
  double noise_dt = 0.0;
  std::size_t workers = 0;
  bool enforce_stiffness = true;

  bool operator==(const SdeConfig&) const = default;
};

std::size_t step_count(const SdeConfig& cfg);
std::size_t noise_substeps(const SdeConfig& cfg);
// Throws invalid-parameter for inconsistent grids.
void validate_sde_config(const SdeConfig& cfg);
// Message when dt breaks dt <= eps^2/10 (eps^2/2 for splitting with quadratic Phi2).
std::optional<std::string> stiffness_violation(const SdeConfig& cfg, const PotentialSpec& phi2);

struct GuardStats {
  std::uint64_t shrinks = 0;
  std::uint64_t redraws = 0;
  std::uint64_t unrecovered = 0;
};

struct PathEnsemble {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::size_t d = 0;
  bool has_velocity = true;
  std::vector<double> states;  // [path][time][state]
  SdeConfig config;
  std::string phi1_id;
  std::string phi2_id;
  std::string init_label;
  std::string rng_lineage;
  std::uint64_t config_hash = 0;
  GuardStats guard;

  std::size_t state_dim() const { return has_velocity ? 2 * d : d; }
  std::size_t grid() const { return times.size(); }
  std::span<const double> state(std::size_t path, std::size_t k) const {
    return {states.data() + (path * grid() + k) * state_dim(), state_dim()};
  }
  double x(std::size_t path, std::size_t k, std::size_t i = 0) const { return state(path, k)[i]; }
  double v(std::size_t path, std::size_t k, std::size_t i = 0) const { return state(path, k)[d + i]; }
  // Index of a recorded time (tolerance 1e-9); invalid-input if absent.
  std::size_t time_index(double t) const;
};

// dX = (1/eps) grad Phi2(V) dt, dV = -(1/eps) grad Phi1(X) dt - (1/eps^2) grad Phi2(V) dt + (sqrt 2/eps) dB
PathEnsemble simulate_gshs(const PotentialSpec& phi1, const PotentialSpec& phi2,
                           const InitialDistribution& init, const SdeConfig& cfg);
// Explicit initial states, row-major n_paths x 2d.
PathEnsemble simulate_gshs(const PotentialSpec& phi1, const PotentialSpec& phi2,
                           std::span<const double> initial, const SdeConfig& cfg,
                           std::string init_label = "explicit");

// dX = -grad Phi1(X) dt + sqrt 2 dB (Euler-Maruyama).
PathEnsemble simulate_overdamped(const PotentialSpec& phi1, const InitialDistribution& init,
                                 const SdeConfig& cfg);
PathEnsemble simulate_overdamped(const PotentialSpec& phi1, std::span<const double> initial,
                                 const SdeConfig& cfg, std::string init_label = "explicit");

}  // namespace gshs
