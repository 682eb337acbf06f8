#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gshs/error.hpp"
#include "gshs/potentials.hpp"
#include "gshs/quadrature.hpp"

using namespace gshs;

namespace {

// Central differences of value for gradient and Hessian diagonal.
void fd_check(const PotentialSpec& phi, std::vector<double> p, double tol = 1e-6) {
  const double h = 1e-5;
  auto g = phi.grad_at(p);
  std::vector<double> hd(p.size());
  phi.hessian_diag_at(p, hd);
  double lap = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto a = p, b = p;
    a[i] += h;
    b[i] -= h;
    const double fa = phi.value_at(a), fb = phi.value_at(b), f0 = phi.value_at(p);
    CHECK(g[i] == doctest::Approx((fa - fb) / (2 * h)).epsilon(tol).scale(1.0));
    CHECK(hd[i] == doctest::Approx((fa - 2 * f0 + fb) / (h * h)).epsilon(1e-4).scale(1.0));
    lap += hd[i];
  }
  CHECK(phi.laplacian_at(p) == doctest::Approx(lap).epsilon(1e-12));
}

double mass_1d(const PotentialSpec& phi, double lo, double hi) {
  return integrate_1d([&](double v) { return std::exp(-phi.value_at(std::span<const double>(&v, 1))); }, lo, hi,
                      1e-12);
}

}  // namespace

TEST_CASE("built-in potentials: values") {
  std::vector<double> p{0.5, -1.5};
  CHECK(make_quadratic(2, 3.0).value_at(p) == doctest::Approx(1.5 * (0.25 + 2.25)));
  CHECK(make_quartic(2, 2.0).value_at(p) == doctest::Approx(0.5 * std::pow(0.25 + 2.25, 2)));
  CHECK(make_double_well(2, 1.5).value_at(p) == doctest::Approx(1.5 * std::pow(2.5 - 1.0, 2)));
  CHECK(make_linear(2, -1.0).value_at(p) == doctest::Approx(1.0));
  CHECK(make_zero(2).value_at(p) == 0.0);
  const double r = std::sqrt(2.5);
  CHECK(make_lennard_jones(2, 2.0, 0.5).value_at(p) ==
        doctest::Approx(2.0 * (std::pow(r, -12) - std::pow(r, -6)) + 0.25 * 2.5));
}

TEST_CASE("built-in potentials: derivatives match finite differences") {
  fd_check(make_quadratic(2, 3.0), {0.3, -0.7});
  fd_check(make_quartic(2), {0.3, -0.7});
  fd_check(make_double_well(2), {0.3, -0.7});
  fd_check(make_lennard_jones(1), {1.1});
  fd_check(make_lennard_jones(2), {0.8, 0.7});
}

TEST_CASE("Lennard-Jones is singular and infinite off its domain") {
  auto lj = make_lennard_jones(1);
  std::vector<double> neg{-0.5}, zero{0.0}, pos{1.0};
  CHECK(lj.singular());
  CHECK_FALSE(lj.finite_domain(neg));
  CHECK_FALSE(lj.finite_domain(zero));
  CHECK(lj.finite_domain(pos));
  CHECK(lj.distance_to_singularity(pos) == doctest::Approx(1.0));
}

TEST_CASE("quadratic stiffness is exposed for exact OU substeps") {
  CHECK(make_quadratic(1, 2.5).quadratic_stiffness() == 2.5);
  CHECK_FALSE(make_quartic(1).quadratic_stiffness());
  auto s = scale_velocity_potential(make_quadratic(1, 2.0), 0.5);
  REQUIRE(s.quadratic_stiffness());
  CHECK(*s.quadratic_stiffness() == doctest::Approx(8.0));
}

TEST_CASE("velocity scaling relations") {
  for (auto phi2 : {make_quadratic(2), make_quartic(2)}) {
    for (double eps : {0.1, 0.5, 1.0}) {
      auto s = scale_velocity_potential(phi2, eps);
      std::vector<double> v{0.03, -0.02}, u{v[0] / eps, v[1] / eps};
      CHECK(s.value_at(v) == doctest::Approx(phi2.value_at(u) + 2 * std::log(eps)).epsilon(1e-13));
      auto g = s.grad_at(v), gu = phi2.grad_at(u);
      for (int i = 0; i < 2; ++i) CHECK(g[i] == doctest::Approx(gu[i] / eps).epsilon(1e-13));
      CHECK(s.laplacian_at(v) == doctest::Approx(phi2.laplacian_at(u) / (eps * eps)).epsilon(1e-13));
      CHECK(s.symmetric() == phi2.symmetric());
    }
  }
}

TEST_CASE("scaled kinetic potential keeps its Gibbs mass") {
  for (auto phi2 : {make_quadratic(1), make_quartic(1)}) {
    const double m = mass_1d(phi2, -12, 12);
    for (double eps : {0.05, 0.1, 0.5, 1.0}) {
      auto s = scale_velocity_potential(phi2, eps);
      CHECK(mass_1d(s, -12 * eps, 12 * eps) == doctest::Approx(m).epsilon(1e-6));
    }
  }
  CHECK(mass_1d(make_quadratic(1), -12, 12) == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("expression potentials agree with the built-ins") {
  auto e = make_expression(1, "x^4/4");
  auto q = make_quartic(1);
  for (double x : {-1.3, 0.2, 2.0}) {
    std::vector<double> p{x};
    CHECK(e.value_at(p) == doctest::Approx(q.value_at(p)));
    CHECK(e.grad_at(p)[0] == doctest::Approx(q.grad_at(p)[0]));
    CHECK(e.laplacian_at(p) == doctest::Approx(q.laplacian_at(p)));
  }
  auto e2 = make_expression(2, "exp(-r^2) + log(1 + x1^2) + sqrt(1 + abs(x2)) * x2");
  fd_check(e2, {0.4, 0.9});
  ExpressionOptions o;
  o.singular_at_origin = true;
  auto sing = make_expression(1, "x^(-12) - x^(-6)", o);
  CHECK(sing.singular());
}

TEST_CASE("expression parse errors name the problem") {
  CHECK_THROWS_AS(make_expression(1, "x + (2"), Error);
  CHECK_THROWS_AS(make_expression(1, "y^2"), Error);
  CHECK_THROWS_AS(make_expression(1, "foo(x)"), Error);
}

TEST_CASE("registry resolves declarations and rejects unknown names") {
  PotentialDecl d{"double-well", 1, {{"a", 2.0}}, "", false, false};
  std::vector<double> p{0.5};
  CHECK(make_potential(d).value_at(p) == doctest::Approx(2.0 * 0.75 * 0.75));
  d.kind = "no-such";
  CHECK_THROWS_AS(make_potential(d), Error);
  PotentialDecl bad{"quadratic", 1, {{"stiffness", 2.0}}, "", false, false};
  CHECK_THROWS_AS(make_potential(bad), Error);
}

TEST_CASE("growth condition check") {
  std::vector<std::vector<double>> probes;
  for (double v = -5; v <= 5; v += 0.1) probes.push_back({v});
  CHECK(check_growth_condition(make_quadratic(1), {3.0, 1.0}, probes).verified);
  // Lap = 3v^2 vs 1 + |v|^3: fails near |v| ~ 1 for K = 0.5.
  auto rep = check_growth_condition(make_quartic(1), {0.5, 1.0}, probes);
  CHECK_FALSE(rep.verified);
  CHECK(rep.max_violation > 0);
}
