#include <doctest.h>

#include <cmath>
#include <vector>

#include "gshs/error.hpp"
#include "gshs/generator.hpp"
#include "gshs/rng.hpp"
#include "gshs/test_functions.hpp"

using namespace gshs;

TEST_CASE("test function derivatives match finite differences") {
  std::vector<double> p{0.2, -0.1, 0.3, 0.05};
  CHECK(derivative_check(*bump({0.0, 0.0, 0.0, 0.0}, 1.0), p) < 1e-5);
  CHECK(derivative_check(*square(coordinate_f(2, 1)), p) < 1e-5);
  CHECK(derivative_check(*hermite(4, 2, 3), p) < 1e-5);
  CHECK(derivative_check(*product(bump({0.1, 0.0, 0.2, 0.0}, 1.5), affine({1, 2, 3, 4}, 1)), p) < 1e-5);
  CHECK(derivative_check(*velocity_reversed(bump({0.0, 0.0, 0.2, -0.1}, 1.0)), p) < 1e-5);
}

TEST_CASE("bumps vanish outside their support ball") {
  auto b = bump({1.0, 2.0}, 0.5);
  CHECK(b->value(std::vector<double>{1.0, 2.0}) == 1.0);
  CHECK(b->value(std::vector<double>{1.6, 2.0}) == 0.0);
  CHECK(b->support_radius() == 0.5);
  CHECK_FALSE(b->smooth());
}

TEST_CASE("OU generator on affine functions") {
  // phi1 = k x^2/2, phi2 = v^2/2: L(a x + b v) = (1/eps) a v - (1/eps) b k x - (1/eps^2) b v
  auto phi1 = make_quadratic(1, 3.0), phi2 = make_quadratic(1);
  auto f = affine({0.7, -1.3});
  std::vector<double> p{0.4, -0.9};
  for (double eps : {0.1, 0.5, 1.0}) {
    const double expect = (0.7 * p[1] + 1.3 * 3.0 * p[0]) / eps + 1.3 * p[1] / (eps * eps);
    CHECK(apply_gshs_generator(phi1, phi2, eps, *f, p) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("generator decomposition and carre du champ") {
  auto phi1 = make_double_well(1), phi2 = make_quartic(1);
  auto f = bump({0.1, -0.2}, 1.3);
  Rng rng(4, 0);
  for (int n = 0; n < 50; ++n) {
    std::vector<double> p{2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    auto dc = decompose(phi1, phi2, *f, p);
    CHECK(dc.s_part + dc.a_part ==
          doctest::Approx(apply_gshs_generator(phi1, phi2, 1.0, *f, p)).epsilon(1e-12).scale(1.0));
    CHECK(dc.s_part - dc.a_part ==
          doctest::Approx(apply_adjoint_generator(phi1, phi2, 1.0, *f, p)).epsilon(1e-12).scale(1.0));
    std::vector<double> g(2);
    f->gradient(p, g);
    for (double eps : {0.3, 1.0})
      CHECK(carre_du_champ(phi1, phi2, *f, p, eps) == doctest::Approx(2 * g[1] * g[1] / (eps * eps)));
  }
}

TEST_CASE("overdamped generator and its invariance") {
  auto phi1 = make_quadratic(1, 2.0);
  auto f = polynomial(1, 0, {0.0, 0.0, 1.0});
  // L x^2 = 2 - 2 k x^2
  CHECK(apply_overdamped_generator(phi1, *f, std::vector<double>{0.5}) == doctest::Approx(2 - 4 * 0.25));
  auto r = overdamped_invariance_residual(make_double_well(1), *bump({0.3}, 0.8));
  CHECK(r.relative < 1e-8);
}

TEST_CASE("generator errors") {
  auto lj = make_lennard_jones(1);
  auto f = bump({1.0, 0.0}, 0.5);
  CHECK_THROWS_AS(apply_gshs_generator(lj, make_quadratic(1), 1.0, *f, std::vector<double>{-1.0, 0.0}), Error);
  CHECK_THROWS_AS(apply_gshs_generator(make_quadratic(1), make_quadratic(1), 0.0, *f, std::vector<double>{0, 0}),
                  Error);
  CHECK_THROWS_AS(apply_gshs_generator(make_quadratic(2), make_quadratic(1), 1.0, *f, std::vector<double>{0, 0}),
                  Error);
  try {
    apply_adjoint_generator(make_quadratic(1), make_expression(1, "x^2/2 + x^3/100"), 1.0, *f,
                            std::vector<double>{0.5, 0.0});
    FAIL("expected a precondition violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolation);
  }
}
