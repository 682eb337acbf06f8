#include <doctest.h>

#include <cmath>
#include <vector>

#include "gshs/dynamics.hpp"
#include "gshs/martingale.hpp"
#include "gshs/measures.hpp"
#include "gshs/rng.hpp"
#include "gshs/stats.hpp"
#include "gshs/test_functions.hpp"

using namespace gshs;

namespace {

// Brute-force V-statistic, the reference for the library routes.
double brute_energy(const FddSample& a, const FddSample& b) {
  auto dist = [](std::span<const double> p, std::span<const double> q) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
    return std::sqrt(s);
  };
  auto mean = [&](const FddSample& u, const FddSample& w) {
    double s = 0;
    for (std::size_t i = 0; i < u.n; ++i)
      for (std::size_t j = 0; j < w.n; ++j) s += dist(u.row(i), w.row(j));
    return s / (static_cast<double>(u.n) * static_cast<double>(w.n));
  };
  return 2 * mean(a, b) - mean(a, a) - mean(b, b);
}

FddSample gaussian_sample(std::size_t n, std::size_t dim, double shift, std::uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<double> data(n * dim);
  for (auto& x : data) x = rng.normal() + shift;
  std::vector<double> times(dim);
  for (std::size_t k = 0; k < dim; ++k) times[k] = 0.5 * static_cast<double>(k + 1);
  return make_fdd(std::move(times), dim, std::move(data), "g");
}

PathEnsemble ou_paths(std::size_t n, std::uint64_t seed) {
  SdeConfig c;
  c.t_end = 1.0;
  c.dt = 1e-3;
  c.n_paths = n;
  c.seed = seed;
  c.record_stride = 10;
  auto init = InitialDistribution::stationary(GibbsMeasure::joint(make_quadratic(1), make_quadratic(1)));
  return simulate_gshs(make_quadratic(1), make_quadratic(1), init, c);
}

}  // namespace

TEST_CASE("energy distance: exact route matches brute force") {
  auto a = gaussian_sample(150, 2, 0.0, 1), b = gaussian_sample(120, 2, 0.3, 2);
  EnergyOptions o;
  o.permutations = 0;
  auto r = energy_distance(a, b, o);
  CHECK(r.exact);
  CHECK(r.p_value == 1.0);
  CHECK(r.statistic == doctest::Approx(brute_energy(a, b)).epsilon(1e-10));
}

TEST_CASE("energy distance: projection route") {
  EnergyOptions o;
  o.permutations = 0;
  o.exact_limit = 10;
  // One dimension: the projection is exact.
  auto a1 = gaussian_sample(300, 1, 0.0, 3), b1 = gaussian_sample(250, 1, 0.5, 4);
  auto r1 = energy_distance(a1, b1, o);
  CHECK_FALSE(r1.exact);
  CHECK(r1.statistic == doctest::Approx(brute_energy(a1, b1)).epsilon(1e-9));
  auto a2 = gaussian_sample(300, 2, 0.0, 5), b2 = gaussian_sample(300, 2, 0.5, 6);
  CHECK(energy_distance(a2, b2, o).statistic == doctest::Approx(brute_energy(a2, b2)).epsilon(0.05));
}

TEST_CASE("energy distance: identical samples and permutation p-values") {
  auto a = gaussian_sample(200, 2, 0.0, 7);
  EnergyOptions o;
  o.permutations = 99;
  auto same = energy_distance(a, a, o);
  CHECK(std::abs(same.statistic) < 1e-12);
  CHECK(same.p_value == 1.0);
  auto far = energy_distance(a, gaussian_sample(200, 2, 1.5, 8), o);
  CHECK(far.p_value == doctest::Approx(1.0 / 100.0));
  auto again = energy_distance(a, gaussian_sample(200, 2, 1.5, 8), o);
  CHECK(again.p_value == far.p_value);
}

TEST_CASE("path metric") {
  PathMetricConfig m{1};
  std::vector<double> a{1.0, 2.0}, b{0.0, 0.0};
  CHECK(m(a, b) == 5.0);
  CHECK(m(a, a) == 0.0);
}

TEST_CASE("Kolmogorov-Smirnov and Anderson-Darling on exact quantiles") {
  const std::size_t n = 500;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (i + 0.5) / n;
  auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic(u, cdf) == doctest::Approx(0.5 / n));
  CHECK(ks_critical_1pct(n) == doctest::Approx(1.6276 / std::sqrt(500.0)).epsilon(1e-3));
  CHECK(anderson_darling(u, cdf) < 0.01);
  std::vector<double> shifted(n);
  for (std::size_t i = 0; i < n; ++i) shifted[i] = std::min(1.0, u[i] * 0.8);
  CHECK(anderson_darling(shifted, cdf) > kAndersonDarling1pct);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("rescaling maps are inverse to each other") {
  auto ens = ou_paths(20, 3);
  CHECK(rescale_ensemble(ens, 1.0).states == ens.states);
  auto back = to_scaled_kinetic_frame(rescale_ensemble(ens, 0.25), 0.25);
  for (std::size_t i = 0; i < ens.states.size(); ++i)
    CHECK(back.states[i] == doctest::Approx(ens.states[i]).epsilon(1e-15));
  auto r = rescale_ensemble(ens, 0.5);
  CHECK(r.v(3, 4) == doctest::Approx(2 * ens.v(3, 4)));
  CHECK(r.x(3, 4) == ens.x(3, 4));
}

TEST_CASE("martingale of a constant function vanishes") {
  auto ens = ou_paths(50, 4);
  auto gen = gshs_generator(make_quadratic(1), make_quadratic(1), 1.0);
  auto M = martingale_process(ens, *constant_function(2, 3.0), gen);
  for (double v : M.values) CHECK(v == 0.0);
}

TEST_CASE("OU martingale: variance, quadratic variation and z-scores") {
  auto ens = ou_paths(2000, 5);
  auto gen = gshs_generator(make_quadratic(1), make_quadratic(1), 1.0);
  auto f = coordinate_g(1, 0);
  auto M = martingale_process(ens, *f, gen);
  const std::size_t k = M.grid() - 1;
  double m2 = 0;
  for (std::size_t i = 0; i < M.n_paths; ++i) m2 += M.at(i, k) * M.at(i, k);
  // E M_1^2 = int_0^1 2 |d_v g|^2 ds = 2; sd of the estimate ~ 2 sqrt(2/n)
  CHECK(m2 / M.n_paths == doctest::Approx(2.0).epsilon(0.1));

  auto qc = quadratic_compensator(ens, *f, gen);
  auto qv = empirical_quadratic_variation(M, &qc);
  CHECK(qv.qv.back() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(qv.compensator.back() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(qv.lo.back() <= qv.qv.back());
  CHECK(qv.hi.back() >= qv.qv.back());

  auto zs = martingale_zscores(M, ens, {{0.25, 0.75}, {0.0, 1.0}}, default_weights(true));
  CHECK(zs.size() == 8);
  CHECK(max_abs_z(zs) < 4.0);

  MartingaleOptions neg;
  neg.include_compensator = false;
  auto D = martingale_process(ens, *f, gen, neg);
  // V_t - V_0 alone is not a martingale: E[V_s (V_t - V_s)] < 0 under the OU drift.
  auto zneg = martingale_zscores(D, ens, {{0.25, 0.75}}, default_weights(true));
  CHECK(max_abs_z(zneg) > 5.0);
}

TEST_CASE("semigroup estimate of a bounded function") {
  auto ens = ou_paths(500, 6);
  auto e = semigroup_estimate(ens, *constant_function(2, 2.5), 0.5);
  CHECK(e.mean == 2.5);
  CHECK(e.stderr_ == 0.0);
}
