#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gshs/potentials.hpp"
#include "gshs/quadrature.hpp"

namespace gshs {

enum class AssumptionStatus { Verified, Violated, NotMachineCheckable };
const char* to_string(AssumptionStatus s);

struct AssumptionEntry {
  std::string name;  // "(Phi1 1)" .. "(Phi1 9)", "(Phi2 1)" .. "(Phi2 11)"
  AssumptionStatus status = AssumptionStatus::NotMachineCheckable;
  std::vector<std::pair<std::string, double>> evidence;
  std::string notes;
};

struct AssumptionReport {
  std::string phi1_id, phi2_id;
  std::vector<AssumptionEntry> entries;

  const AssumptionEntry& at(const std::string& name) const;
  bool has_violation() const;
  std::vector<std::string> violations() const;
  // Columns name,status,evidence,notes; evidence is "key=value;..." .
  std::string to_csv(std::uint64_t config_hash) const;
};

// Labels in report order.
const std::vector<std::string>& assumption_labels();

struct ValidationOptions {
  QuadratureConfig quadrature;
  // Candidate constants for the growth condition; default K = d + 2, alpha = 1.
  std::optional<GrowthConstants> growth;
  double probe_half_width = 50.0;
  std::uint64_t seed = 0x5eed;
};

// Probe points: a uniform grid on [-half, half]^d (20001 points for d = 1,
// 301^2 for d = 2), seeded uniform points for d >= 3.
std::vector<std::vector<double>> probe_grid(std::size_t d, double half, std::uint64_t seed);

// Quadrature non-convergence throws numeric-failure naming the assumption.
AssumptionReport validate_assumptions(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                      const ValidationOptions& opts = {});

}  // namespace gshs
