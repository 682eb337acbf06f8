#include <doctest.h>

#include <algorithm>
#include <string>

#include "gshs/assumptions.hpp"

using namespace gshs;

TEST_CASE("Gaussian pair satisfies every checkable assumption") {
  auto rep = validate_assumptions(make_quadratic(1), make_quadratic(1));
  CHECK_FALSE(rep.has_violation());
  CHECK(rep.entries.size() == assumption_labels().size());
  CHECK(rep.at("(Phi1 6)").status == AssumptionStatus::Verified);
  CHECK(rep.at("(Phi1 5)").status == AssumptionStatus::NotMachineCheckable);
}

TEST_CASE("linear position potential is not bounded below") {
  auto rep = validate_assumptions(make_linear(1), make_quadratic(1));
  CHECK(rep.has_violation());
  CHECK(rep.at("(Phi1 2)").status == AssumptionStatus::Violated);
}

TEST_CASE("zero position potential has infinite Gibbs mass") {
  auto rep = validate_assumptions(make_zero(1), make_quadratic(1));
  CHECK(rep.at("(Phi1 6)").status == AssumptionStatus::Violated);
  const auto v = rep.violations();
  CHECK(std::find(v.begin(), v.end(), "(Phi1 6)") != v.end());
}

TEST_CASE("Lennard-Jones pair passes the checkable assumptions") {
  auto rep = validate_assumptions(make_lennard_jones(1), make_quadratic(1));
  CHECK_FALSE(rep.has_violation());
}

TEST_CASE("assumption CSV layout") {
  auto rep = validate_assumptions(make_quadratic(1), make_quartic(1));
  const std::string csv = rep.to_csv(0xabc);
  CHECK(csv.rfind("name,status,evidence,notes", 0) == 0);
  CHECK(csv.find("(Phi2 11)") != std::string::npos);
  CHECK(csv.find("config_hash") != std::string::npos);
}
