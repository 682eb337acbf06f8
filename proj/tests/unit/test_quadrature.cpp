#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gshs/quadrature.hpp"

using namespace gshs;

TEST_CASE("1d Gauss-Kronrod integrates a Gaussian") {
  double v = integrate_1d([](double x) { return std::exp(-x * x / 2); }, -12, 12, 1e-12);
  CHECK(v == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(integrate_1d([](double) { return 1.0; }, 1, 0, 1e-10) == 0.0);
}

TEST_CASE("box integral of a separable polynomial") {
  std::vector<double> lo{0, -1}, hi{1, 2};
  double v = integrate_box(lo, hi, [](std::span<const double> p) { return p[0] * p[0] * p[1]; }, 1e-12);
  CHECK(v == doctest::Approx((1.0 / 3.0) * 1.5).epsilon(1e-12));
}

TEST_CASE("ball integral gives the disc area and a radial moment") {
  std::vector<double> c{0.5, -0.25};
  double area = integrate_ball(c, 0.7, [](std::span<const double>) { return 1.0; }, 1e-10);
  CHECK(area == doctest::Approx(std::numbers::pi * 0.49).epsilon(1e-9));
  // integral of |p - c|^2 over the disc = pi r^4 / 2
  double m = integrate_ball(
      c, 0.7,
      [&](std::span<const double> p) {
        return (p[0] - c[0]) * (p[0] - c[0]) + (p[1] - c[1]) * (p[1] - c[1]);
      },
      1e-10);
  CHECK(m == doctest::Approx(std::numbers::pi * std::pow(0.7, 4) / 2).epsilon(1e-9));
}

TEST_CASE("nested limits describe a triangle") {
  // {0 <= x <= 1, 0 <= y <= x}: integral of y is 1/6.
  auto lim = [](std::size_t k, std::span<const double> pre) -> std::pair<double, double> {
    return k == 0 ? std::pair{0.0, 1.0} : std::pair{0.0, pre[0]};
  };
  double v = integrate_nested(2, lim, [](std::span<const double> p) { return p[1]; }, 1e-12);
  CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("Monte Carlo importance sampling in three dimensions") {
  QuadratureConfig cfg;
  cfg.mc_rel_err = 2e-3;
  std::vector<double> c(3, 0.0);
  auto r = integrate_monte_carlo(
      3, c, 1.2, [](std::span<const double> p) { return std::exp(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 2); },
      cfg);
  const double exact = std::pow(2 * std::numbers::pi, 1.5);
  CHECK(std::abs(r.value - exact) / exact < 5 * r.rel_std_error + 1e-12);
  CHECK(r.rel_std_error <= 2e-3);
}
