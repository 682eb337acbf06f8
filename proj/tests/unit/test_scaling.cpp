#include <doctest.h>

#include <cmath>
#include <vector>

#include "gshs/generator.hpp"
#include "gshs/rng.hpp"
#include "gshs/scaling.hpp"
#include "gshs/test_functions.hpp"

using namespace gshs;

TEST_CASE("cutoff profile is a C2 transition from 1 to 0") {
  CHECK(cutoff_profile(0.5) == 1.0);
  CHECK(cutoff_profile(1.0) == 1.0);
  CHECK(cutoff_profile(1.5) == doctest::Approx(0.5));
  CHECK(cutoff_profile(2.0) == 0.0);
  CHECK(cutoff_profile(3.0) == 0.0);
  for (double r : {1.0, 2.0}) {
    CHECK(std::abs(cutoff_profile_d1(r)) < 1e-14);
    CHECK(std::abs(cutoff_profile_d2(r)) < 1e-14);
  }
  const double h = 1e-5;
  for (double r : {1.2, 1.5, 1.8}) {
    CHECK(cutoff_profile_d1(r) ==
          doctest::Approx((cutoff_profile(r + h) - cutoff_profile(r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(cutoff_profile_d2(r) ==
          doctest::Approx((cutoff_profile_d1(r + h) - cutoff_profile_d1(r - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("cutoff derivative bounds hold with an eps-independent constant") {
  const double C = build_cutoff(1.0).C;
  for (double eps : {1.0, 0.5, 0.25, 0.1}) {
    auto eta = build_cutoff(eps);
    CHECK(eta.C == doctest::Approx(C));
    CHECK(eta.inner_radius == doctest::Approx(1 / (eps * eps)));
    double worst_g = 0, worst_l = 0;
    for (int k = 0; k <= 2000; ++k) {
      std::vector<double> v{3.0 * k / (2000 * eps * eps)}, g(1);
      eta.gradient(v, g);
      worst_g = std::max(worst_g, std::abs(g[0]) / (eps * eps));
      worst_l = std::max(worst_l, std::abs(eta.laplacian(v)) / std::pow(eps, 4));
    }
    CHECK(worst_g <= C * (1 + 1e-12));
    CHECK(worst_l <= C * (1 + 1e-12));
  }
}

TEST_CASE("embedded functions have exact derivatives") {
  auto eta = build_cutoff(0.8);
  auto F = embed(bump({0.2}, 1.0), eta);
  Rng rng(2, 0);
  for (int n = 0; n < 20; ++n) {
    std::vector<double> p{rng.uniform() - 0.5, 2.5 * rng.uniform() - 0.5};
    // Truncation error of the central differences scales as h^2 near the
    // C^3 edge of the bump.
    CHECK(derivative_check(*F, p) < 1e-4);
  }
}

TEST_CASE("generator summands add up to the generator") {
  auto f = bump({0.1}, 1.0);
  auto phi1 = make_double_well(1), phi2 = make_quartic(1);
  for (double eps : {0.9, 0.6}) {
    auto eta = build_cutoff(eps);
    auto phi2e = scale_velocity_potential(phi2, eps);
    auto F = embed(f, eta);
    Rng rng(3, 0);
    for (int n = 0; n < 20; ++n) {
      std::vector<double> p{0.6 * rng.uniform() - 0.3, 4.0 * rng.uniform() - 2.0};
      auto t = generator_summands(*f, phi1, phi2e, eta, p);
      double s = 0;
      for (double v : t) s += v;
      CHECK(s == doctest::Approx(apply_gshs_generator(phi1, phi2e, 1.0, *F, p)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("embedded norm at moderate eps") {
  auto f = bump({0.3}, 1.0);
  auto np = embedded_norm(*f, make_quadratic(1), make_quadratic(1), 0.5);
  CHECK(np.route_gap() < 1e-4);
  CHECK(np.alpha <= 1.0);
  CHECK(np.alpha >= 1.0 - np.alpha_tail_bound - 1e-12);
  CHECK(np.relative_error() < 0.1);
}

TEST_CASE("weak pairing converges") {
  auto u = bump({0.2}, 1.0), phi = bump({-0.1}, 0.9);
  const double lim = limit_pairing(*u, *phi, make_quadratic(1));
  const double at = embedded_pairing(*u, *phi, make_quadratic(1), make_quadratic(1), 0.05);
  CHECK(std::abs(at - lim) <= 0.01 * std::abs(lim));
}
