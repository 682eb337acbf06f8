#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gshs/dynamics.hpp"
#include "gshs/experiments.hpp"
#include "gshs/potentials.hpp"

namespace gshs {

struct StatisticsDecl {
  std::size_t permutations = 200;
  std::vector<double> times{0.5, 1.0};
  std::vector<std::pair<double, double>> pairs{{0.25, 0.75}};
  // Ensemble size for the limit and rescaling experiments.
  std::size_t n_paths = 50000;
  std::size_t battery_paths = 10000;
  double record_dt = 0.01;
  double reference_dt = 1e-3;
  std::vector<double> lags{0.05, 0.1, 0.2, 0.4};

  bool operator==(const StatisticsDecl&) const = default;
};

struct SemigroupDecl {
  // Position-space bump test function.
  std::vector<double> bump_center{0.0};
  double bump_radius = 1.0;
  double rel_tol = 1e-10;

  bool operator==(const SemigroupDecl&) const = default;
};

struct ExperimentConfig {
  PotentialDecl phi1{"quadratic", 1, {}, "", false, false};
  PotentialDecl phi2{"quadratic", 1, {}, "", false, false};
  std::vector<double> eps_grid{0.4, 0.2, 0.1};
  SdeConfig sde;
  InitialDecl initial;
  StatisticsDecl statistics;
  SemigroupDecl semigroup;
  std::string output = "out";
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError carrying the line and column of the offending node.
// Unknown keys, unknown potential kinds and bad parameters are errors.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
// Canonical YAML; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& cfg);
// FNV-1a of the canonical emission, ignoring the worker count and output
// directory (neither changes any result).
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace gshs
