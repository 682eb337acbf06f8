#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "gshs/dynamics.hpp"
#include "gshs/ensemble_io.hpp"
#include "gshs/error.hpp"
#include "gshs/measures.hpp"

using namespace gshs;

namespace {

SdeConfig small_config(double eps = 1.0) {
  SdeConfig c;
  c.eps = eps;
  c.t_end = 0.5;
  c.dt = 1e-3;
  c.n_paths = 400;
  c.seed = 9;
  c.record_stride = 50;
  return c;
}

InitialDistribution gaussian_stationary() {
  return InitialDistribution::stationary(GibbsMeasure::joint(make_quadratic(1), make_quadratic(1)));
}

}  // namespace

TEST_CASE("grid bookkeeping") {
  auto c = small_config();
  CHECK(step_count(c) == 500);
  auto ens = simulate_gshs(make_quadratic(1), make_quadratic(1), gaussian_stationary(), c);
  CHECK(ens.grid() == 11);
  CHECK(ens.times.front() == 0.0);
  CHECK(ens.times.back() == doctest::Approx(0.5));
  CHECK(ens.time_index(0.25) == 5);
  CHECK_THROWS_AS(ens.time_index(0.26), Error);
  CHECK(ens.states.size() == 400 * 11 * 2);
}

TEST_CASE("invalid grids are rejected") {
  auto c = small_config();
  c.dt = 0.0;
  CHECK_THROWS_AS(validate_sde_config(c), Error);
  c = small_config();
  c.t_end = 0.5005;
  CHECK_THROWS_AS(validate_sde_config(c), Error);
  c = small_config();
  c.noise_dt = 3e-3;  // not a divisor-compatible multiple of dt
  c.dt = 2e-3;
  CHECK_THROWS_AS(validate_sde_config(c), Error);
}

TEST_CASE("stiffness guard") {
  auto c = small_config(0.1);
  c.dt = 1e-2;
  c.t_end = 0.5;
  CHECK(stiffness_violation(c, make_quartic(1)).has_value());
  c.dt = 1e-3;
  CHECK_FALSE(stiffness_violation(c, make_quartic(1)).has_value());
  c.dt = 1e-2;
  CHECK_THROWS_AS(simulate_gshs(make_quadratic(1), make_quartic(1), gaussian_stationary(), c), Error);
  auto big = small_config(2.0);
  big.dt = 0.05;
  CHECK_FALSE(stiffness_violation(big, make_quartic(1)).has_value());
}

TEST_CASE("same seed gives identical paths; different seeds differ") {
  auto c = small_config();
  auto a = simulate_gshs(make_double_well(1), make_quartic(1), gaussian_stationary(), c);
  auto b = simulate_gshs(make_double_well(1), make_quartic(1), gaussian_stationary(), c);
  CHECK(a.states == b.states);
  c.seed = 10;
  auto d = simulate_gshs(make_double_well(1), make_quartic(1), gaussian_stationary(), c);
  CHECK(a.states != d.states);
}

TEST_CASE("worker count does not change the ensemble") {
  auto c = small_config();
  c.workers = 1;
  auto a = simulate_gshs(make_quadratic(1), make_quadratic(1), gaussian_stationary(), c);
  c.workers = 3;
  auto b = simulate_gshs(make_quadratic(1), make_quadratic(1), gaussian_stationary(), c);
  std::ostringstream sa, sb;
  write_binary(a, sa);
  write_binary(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("OU stationary law is preserved") {
  for (auto scheme : {Scheme::Splitting, Scheme::EulerMaruyama}) {
    auto c = small_config();
    c.scheme = scheme;
    c.n_paths = 4000;
    c.t_end = 1.0;
    c.record_stride = 1000;
    auto ens = simulate_gshs(make_quadratic(1), make_quadratic(1), gaussian_stationary(), c);
    double vx = 0, vv = 0;
    for (std::size_t i = 0; i < ens.n_paths; ++i) {
      vx += ens.x(i, 1) * ens.x(i, 1);
      vv += ens.v(i, 1) * ens.v(i, 1);
    }
    // sd of the sample second moment is sqrt(2/n) ~ 0.022
    CHECK(vx / ens.n_paths == doctest::Approx(1.0).epsilon(0.08));
    CHECK(vv / ens.n_paths == doctest::Approx(1.0).epsilon(0.08));
  }
}

TEST_CASE("shared noise grid couples runs with different steps") {
  std::vector<double> init(2 * 200, 0.5);
  auto c = small_config();
  c.n_paths = 200;
  c.noise_dt = 5e-4;
  auto coarse = simulate_gshs(make_quadratic(1), make_quadratic(1), init, c);
  c.dt = 5e-4;
  c.record_stride = 100;
  auto fine = simulate_gshs(make_quadratic(1), make_quadratic(1), init, c);
  c.seed = 99;
  auto other = simulate_gshs(make_quadratic(1), make_quadratic(1), init, c);
  double dc = 0, du = 0;
  const std::size_t k = coarse.grid() - 1;
  for (std::size_t i = 0; i < 200; ++i) {
    dc += std::abs(coarse.x(i, k) - fine.x(i, k));
    du += std::abs(other.x(i, k) - fine.x(i, k));
  }
  CHECK(dc < 0.05 * du);
}

TEST_CASE("Lennard-Jones guard keeps paths in the domain") {
  auto base = GibbsMeasure::joint(make_lennard_jones(1), make_quadratic(1));
  auto init = InitialDistribution::position_interval(base, 0.9, 1.5);
  auto c = small_config();
  c.n_paths = 200;
  auto ens = simulate_gshs(make_lennard_jones(1), make_quadratic(1), init, c);
  CHECK(ens.guard.unrecovered == 0);
  for (std::size_t i = 0; i < ens.n_paths; ++i)
    for (std::size_t k = 0; k < ens.grid(); ++k) {
      CHECK(std::isfinite(ens.v(i, k)));
      CHECK(ens.x(i, k) > 0.0);
    }
}

TEST_CASE("overdamped OU matches its transition variance") {
  auto c = small_config();
  c.n_paths = 4000;
  c.t_end = 1.0;
  c.record_stride = 1000;
  std::vector<double> init(4000, 0.0);
  auto ens = simulate_overdamped(make_quadratic(1, 2.0), init, c);
  CHECK_FALSE(ens.has_velocity);
  double m2 = 0;
  for (std::size_t i = 0; i < ens.n_paths; ++i) m2 += ens.x(i, 1) * ens.x(i, 1);
  // Var X_1 = (1 - e^{-2k}) / k
  CHECK(m2 / ens.n_paths == doctest::Approx((1 - std::exp(-4.0)) / 2.0).epsilon(0.08));
}

TEST_CASE("binary and csv ensemble output") {
  auto c = small_config();
  c.n_paths = 3;
  auto ens = simulate_gshs(make_quadratic(2), make_quadratic(2),
                           InitialDistribution::stationary(GibbsMeasure::joint(make_quadratic(2), make_quadratic(2))),
                           c);
  ens.config_hash = 0x1234abcd;
  std::stringstream bin;
  write_binary(ens, bin);
  auto back = read_binary(bin);
  CHECK(back.times == ens.times);
  CHECK(back.states == ens.states);
  CHECK(back.d == 2);
  CHECK(back.n_paths == 3);
  CHECK(back.has_velocity);
  CHECK(back.config_hash == 0x1234abcd);
  std::stringstream bad("not an ensemble");
  CHECK_THROWS_AS(read_binary(bad), Error);

  std::ostringstream csv;
  write_csv(ens, csv);
  const std::string s = csv.str();
  CHECK(s.rfind("path_id,t,x_1,x_2,v_1,v_2", 0) == 0);
  CHECK(s.find("# config_hash=") != std::string::npos);
}
