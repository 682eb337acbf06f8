#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gshs/measures.hpp"

using namespace gshs;

namespace {

// E v^2 under e^{-v^4/4}: 2 Gamma(3/4) / Gamma(1/4).
const double kQuarticV2 = 2.0 * std::tgamma(0.75) / std::tgamma(0.25);

}  // namespace

TEST_CASE("Gaussian normalization and density") {
  auto mu = GibbsMeasure::joint(make_quadratic(1), make_quadratic(1));
  CHECK(normalize(mu) == doctest::Approx(std::log(2 * std::numbers::pi)).epsilon(1e-9));
  std::vector<double> z{0.0, 0.0};
  CHECK(mu.density(z) == doctest::Approx(1 / (2 * std::numbers::pi)).epsilon(1e-9));
  auto mu2 = GibbsMeasure::position(make_quadratic(2, 4.0));
  CHECK(normalize(mu2) == doctest::Approx(std::log(2 * std::numbers::pi / 4.0)).epsilon(1e-8));
}

TEST_CASE("moments against closed forms") {
  auto pos = GibbsMeasure::position(make_quadratic(1, 2.0));
  auto m = moment(pos, {MomentKind::PositionPower, 2});
  REQUIRE(m.finite);
  CHECK(m.value == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(moment(pos, {MomentKind::PositionPower, 4}).value == doctest::Approx(0.75).epsilon(1e-8));
  // E |grad Phi1|^2 = k^2 E x^2 = k
  CHECK(moment(pos, {MomentKind::GradPhi1, 2}).value == doctest::Approx(2.0).epsilon(1e-8));

  auto vel = GibbsMeasure::velocity(make_quartic(1));
  CHECK(moment(vel, {MomentKind::VelocityPower, 2}).value == doctest::Approx(kQuarticV2).epsilon(1e-8));
}

TEST_CASE("integration against the joint measure") {
  auto mu = GibbsMeasure::joint(make_quadratic(1), make_quartic(1));
  double e = integrate_against(mu, [](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1]; });
  CHECK(e == doctest::Approx(1.0 + kQuarticV2).epsilon(1e-8));
  double cross = weighted_l2_inner([](std::span<const double> p) { return p[0]; },
                                   [](std::span<const double> p) { return p[1]; }, mu);
  CHECK(std::abs(cross) < 1e-10);
}

TEST_CASE("unconfined potentials have no truncation box") {
  CHECK_FALSE(truncation_box(make_zero(1)).has_value());
  CHECK_FALSE(truncation_box(make_linear(1)).has_value());
  auto box = truncation_box(make_quadratic(1));
  REQUIRE(box.has_value());
  // e^{-x^2/2} = 1e-16 at |x| = sqrt(2 ln 1e16)
  CHECK(box->hi[0] >= std::sqrt(2 * std::log(1e16)) - 1e-6);
  CHECK(box->lo[0] <= -std::sqrt(2 * std::log(1e16)) + 1e-6);
}

TEST_CASE("exact Gaussian sampler matches the stationary law") {
  auto init = InitialDistribution::stationary(GibbsMeasure::joint(make_quadratic(1, 4.0), make_quadratic(1)));
  const std::size_t n = 40000;
  SamplerDiagnostics diag;
  auto s = sample(init, n, 3, {}, &diag);
  CHECK(diag.exact);
  double mx = 0, vx = 0, vv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += s[2 * i];
    vx += s[2 * i] * s[2 * i];
    vv += s[2 * i + 1] * s[2 * i + 1];
  }
  mx /= n;
  vx /= n;
  vv /= n;
  CHECK(std::abs(mx) < 4 * 0.5 / std::sqrt(n));
  CHECK(vx == doctest::Approx(0.25).epsilon(0.03));
  CHECK(vv == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("MALA sampler on a quartic kinetic potential") {
  auto init = InitialDistribution::stationary(GibbsMeasure::joint(make_quadratic(1), make_quartic(1)));
  const std::size_t n = 20000;
  SamplerDiagnostics diag;
  auto s = sample(init, n, 5, {}, &diag);
  CHECK_FALSE(diag.exact);
  CHECK(diag.acceptance > 0.3);
  double vv = 0;
  for (std::size_t i = 0; i < n; ++i) vv += s[2 * i + 1] * s[2 * i + 1];
  CHECK(vv / n == doctest::Approx(kQuarticV2).epsilon(0.05));
}

TEST_CASE("sampler output does not depend on the worker count") {
  auto init = InitialDistribution::position_interval(
      GibbsMeasure::joint(make_double_well(1), make_quadratic(1)), -0.5, 1.0);
  SamplerOptions one, four;
  one.workers = 1;
  four.workers = 4;
  auto a = sample(init, 9000, 17, one);
  auto b = sample(init, 9000, 17, four);
  CHECK(a == b);
  for (std::size_t i = 0; i < 9000; ++i) {
    CHECK(a[2 * i] >= -0.5);
    CHECK(a[2 * i] <= 1.0);
  }
}

TEST_CASE("weighted initial laws normalize h") {
  auto base = GibbsMeasure::joint(make_quadratic(1), make_quadratic(1));
  auto init = InitialDistribution::position_interval(base, 0.0, kInf);
  CHECK(init.h(std::vector<double>{1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(init.h(std::vector<double>{-1.0, 0.0}) == 0.0);
  REQUIRE(init.h_sup());
  CHECK(*init.h_sup() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(InitialDistribution::stationary(base).trivial());
}
