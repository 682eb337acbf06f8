// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gshs/assumptions.hpp"
#include "gshs/ensemble_io.hpp"
#include "gshs/experiments.hpp"
#include "gshs/generator.hpp"
#include "gshs/measures.hpp"
#include "gshs/rng.hpp"
#include "gshs/scaling.hpp"

using namespace gshs;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string failed_checks(const ConvergenceReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.skipped && !c.passed) s += "[" + c.name + ": " + c.detail + "] ";
  return s;
}

// 1. Closed-form generator values of f_i, g_i and their squares.
Outcome generator_identities() {
  double worst = 0.0;
  for (std::size_t d : {1u, 2u}) {
    auto phi1 = make_double_well(d), phi2 = make_quartic(d);
    for (double eps : {0.1, 0.5, 1.0}) {
      auto phi2e = scale_velocity_potential(phi2, eps);
      Rng rng(derive_seed(7, "points"), static_cast<std::uint64_t>(d * 100 + eps * 10));
      for (int n = 0; n < 100; ++n) {
        std::vector<double> p(2 * d);
        for (auto& c : p) c = 4.0 * rng.uniform() - 2.0;
        std::span<const double> x(p.data(), d), v(p.data() + d, d);
        auto g1 = phi1.grad_at(x), g2 = phi2e.grad_at(v);
        for (std::size_t i = 0; i < d; ++i) {
          const double fi = p[i] + p[d + i], gi = p[d + i];
          const double Lf = -g1[i], Lg = -g2[i] - g1[i], Lhat = -g2[i] + g1[i];
          auto f = coordinate_f(d, i), g = coordinate_g(d, i);
          auto rel = [](double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); };
          worst = std::max(worst, rel(apply_gshs_generator(phi1, phi2e, 1.0, *f, p), Lf));
          worst = std::max(worst, rel(apply_gshs_generator(phi1, phi2e, 1.0, *g, p), Lg));
          worst = std::max(worst, rel(apply_gshs_generator(phi1, phi2e, 1.0, *square(f), p), 2.0 + 2.0 * fi * Lf));
          worst = std::max(worst, rel(apply_gshs_generator(phi1, phi2e, 1.0, *square(g), p), 2.0 + 2.0 * gi * Lg));
          worst = std::max(worst, rel(apply_adjoint_generator(phi1, phi2e, 1.0, *g, p), Lhat));
          worst = std::max(worst,
                           rel(apply_adjoint_generator(phi1, phi2e, 1.0, *square(g), p), 2.0 + 2.0 * gi * Lhat));
        }
      }
    }
  }
  return {worst <= 1e-12, "max relative error " + fmt(worst) + " (tol 1e-12)"};
}

// 2. Integral of L f against the Gibbs measure for bumps.
Outcome invariance() {
  double worst = 0.0;
  struct Case {
    PotentialSpec phi1;
    std::vector<std::vector<double>> centers;
  };
  std::vector<Case> cases{
      {make_quadratic(1), {{0.0, 0.0}, {0.5, -0.3}, {-1.0, 0.7}, {1.2, 1.0}, {-0.4, -1.1}}},
      {make_lennard_jones(1), {{1.1, 0.0}, {1.2, 0.5}, {1.4, -0.6}, {1.0, 0.9}, {1.6, -0.2}}},
  };
  for (const auto& c : cases) {
    for (const auto& ctr : c.centers) {
      auto r = invariance_residual(c.phi1, make_quadratic(1), *bump(ctr, 0.3 + 0.1 * std::abs(ctr[1])));
      worst = std::max(worst, r.relative);
    }
  }
  return {worst <= 1e-6, "max relative residual " + fmt(worst) + " (tol 1e-6)"};
}

// 3. L = S + A with S symmetric and A antisymmetric in L^2(mu).
Outcome decomposition() {
  auto phi1 = make_double_well(1), phi2 = make_quartic(1);
  auto mu = GibbsMeasure::joint(phi1, phi2);
  std::vector<TestFn> fs{bump({0.2, 0.1}, 1.0), bump({-0.3, 0.4}, 0.8), bump({0.0, -0.5}, 1.2)};
  double sym = 0.0, anti = 0.0, point = 0.0;
  for (std::size_t a = 0; a < fs.size(); ++a) {
    for (std::size_t b = a + 1; b < fs.size(); ++b) {
      const auto& f = *fs[a];
      const auto& g = *fs[b];
      auto S = [&](const TestFunction& h) {
        return [&](std::span<const double> p) { return decompose(phi1, phi2, h, p).s_part; };
      };
      auto A = [&](const TestFunction& h) {
        return [&](std::span<const double> p) { return decompose(phi1, phi2, h, p).a_part; };
      };
      auto val = [](const TestFunction& h) { return [&h](std::span<const double> p) { return h.value(p); }; };
      const double sfg = weighted_l2_inner(S(f), val(g), mu), fsg = weighted_l2_inner(val(f), S(g), mu);
      const double afg = weighted_l2_inner(A(f), val(g), mu), fag = weighted_l2_inner(val(f), A(g), mu);
      sym = std::max(sym, std::abs(sfg - fsg) / std::max(std::abs(sfg), std::abs(fsg)));
      anti = std::max(anti, std::abs(afg + fag) / std::max(std::abs(afg), std::abs(fag)));
    }
  }
  Rng rng(11, 0);
  for (int n = 0; n < 100; ++n) {
    std::vector<double> p{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    for (const auto& f : fs) {
      auto dcp = decompose(phi1, phi2, *f, p);
      const double L = apply_gshs_generator(phi1, phi2, 1.0, *f, p);
      point = std::max(point, std::abs(dcp.s_part + dcp.a_part - L) / (1.0 + std::abs(L)));
    }
  }
  const bool ok = sym <= 1e-6 && anti <= 1e-6 && point <= 1e-12;
  return {ok, "symmetry " + fmt(sym) + ", antisymmetry " + fmt(anti) + " (tol 1e-6), S + A - L " + fmt(point) +
                  " (tol 1e-12)"};
}

// 4. Embedded norms converge.
Outcome norms() {
  auto rep = norm_convergence_curve(*bump({0.3}, 1.0), make_quadratic(1), make_quadratic(1), {0.5, 0.2, 0.1, 0.05});
  auto err = rep.column("relative_error");
  std::string d = "relative errors";
  for (double e : err) d += " " + fmt(e);
  d += ", alpha(0.05) - 1 = " + fmt(rep.rows.back()[rep.column_index("alpha_eps")] - 1.0);
  return {rep.passed(), d + (rep.passed() ? "" : "; " + failed_checks(rep))};
}

// 5. Generator summands.
Outcome summands() {
  auto f = bump({0.3}, 1.0);
  auto phi = make_quadratic(1);
  auto big = generator_summand_norms(*f, phi, phi, 0.5);
  auto small = generator_summand_norms(*f, phi, phi, 0.05);
  bool ok = small.term5_distance <= 0.02;
  std::string d;
  for (int k = 0; k < 4; ++k) {
    ok = ok && small.norms[k] <= 0.1 * big.norms[k];
    d += "term" + std::to_string(k + 1) + " " + fmt(big.norms[k]) + " -> " + fmt(small.norms[k]) + ", ";
  }
  ok = ok && big.reconstruction_error <= 1e-10 && small.reconstruction_error <= 1e-10;
  d += "term5 distance " + fmt(small.term5_distance) + ", reconstruction " +
       fmt(std::max(big.reconstruction_error, small.reconstruction_error));
  return {ok, d};
}

// 6. Martingale structure and the negative control.
Outcome martingales() {
  auto phi = make_quadratic(1);
  MartingaleExperimentOptions o;
  auto res = martingale_experiment(phi, phi, o);
  o.no_compensator = true;
  o.identity_paths = 10;
  auto neg = martingale_experiment(phi, phi, o);
  const double zneg = max_abs_z(neg.zscores);
  const bool ok = res.report.passed() && zneg > 5.0;
  std::string d = "max |z| " + fmt(max_abs_z(res.zscores)) + ", QV(1) " +
                  fmt(res.report.rows.back()[res.report.column_index("qv_g1")]) + ", negative control max |z| " +
                  fmt(zneg);
  return {ok, d + (ok ? "" : "; " + failed_checks(res.report))};
}

// 7. Increment moments.
Outcome tightness() {
  auto phi = make_quadratic(1);
  auto rep = tightness_experiment(phi, phi, {});
  std::string d;
  for (const auto& r : rep.rows)
    d += "eps " + fmt(r[0]) + ": exponents " + fmt(r[2]) + "/" + fmt(r[4]) + ", constants " + fmt(r[3]) + "/" +
         fmt(r[5]) + "; ";
  return {rep.passed(), d + (rep.passed() ? "" : failed_checks(rep))};
}

// 8. Overdamped limit at the default seed plus a 20-seed robustness sweep.
Outcome overdamped_limit() {
  auto phi = make_quadratic(1);
  LimitOptions o;
  auto rep = overdamped_limit_experiment(phi, phi, o);
  std::string d = "distances";
  for (double v : rep.column("energy_distance")) d += " " + fmt(v);
  d += ", p(0.1) = " + fmt(rep.rows.back()[3]);
  int decreasing = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    LimitOptions q = o;
    q.seed = 1000 + s;
    q.permutations = 0;
    q.battery_paths = 1000;
    auto r = overdamped_limit_experiment(phi, phi, q);
    auto dist = r.column("energy_distance");
    if (dist[1] < dist[0] && dist[2] < dist[1]) ++decreasing;
  }
  d += ", strictly decreasing in " + std::to_string(decreasing) + "/20 seeds";
  const bool ok = rep.passed() && decreasing >= 18;
  return {ok, d + (rep.passed() ? "" : "; " + failed_checks(rep))};
}

// 9. Velocity rescaling equivalence.
Outcome rescaling() {
  auto phi = make_quadratic(1);
  auto rep = rescaling_experiment(phi, phi, {});
  std::string d;
  for (const auto& r : rep.rows) d += "eps " + fmt(r[0]) + ": p = " + fmt(r[2]) + "; ";
  return {rep.passed(), d + (rep.passed() ? "" : failed_checks(rep))};
}

// 10. Lennard-Jones stationary run.
Outcome singular() {
  auto lj = make_lennard_jones(1), phi2 = make_quadratic(1);
  auto val = validate_assumptions(lj, phi2);
  SdeConfig cfg;
  cfg.n_paths = 10000;
  cfg.t_end = 1.0;
  cfg.dt = 1e-3;
  cfg.record_stride = 10;
  cfg.seed = 3;
  auto ens = simulate_gshs(lj, phi2, InitialDistribution::stationary(GibbsMeasure::joint(lj, phi2)), cfg);
  std::size_t bad = 0;
  for (double s : ens.states)
    if (!std::isfinite(s)) ++bad;
  std::string viol;
  for (const auto& v : val.violations()) viol += v + " ";
  const bool ok = bad == 0 && ens.guard.unrecovered == 0 && !val.has_violation();
  return {ok, "non-finite states " + std::to_string(bad) + ", unrecovered " + std::to_string(ens.guard.unrecovered) +
                  ", shrinks " + std::to_string(ens.guard.shrinks) + ", validator violations: " +
                  (viol.empty() ? "none" : viol)};
}

// 11. Byte-identical ensemble files across worker counts.
Outcome determinism() {
  auto lj = make_lennard_jones(1), phi2 = make_quadratic(1);
  auto bytes = [&](std::size_t workers) {
    SdeConfig cfg;
    cfg.n_paths = 2000;
    cfg.t_end = 0.5;
    cfg.dt = 1e-3;
    cfg.record_stride = 10;
    cfg.seed = 5;
    cfg.workers = workers;
    auto ens = simulate_gshs(lj, phi2, InitialDistribution::stationary(GibbsMeasure::joint(lj, phi2)), cfg);
    std::ostringstream os;
    write_binary(ens, os);
    return os.str();
  };
  const auto a = bytes(1), b = bytes(8);
  return {a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

// Optional arguments select criteria by number; none runs all of them.
int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> all{
      {"1 generator identities", generator_identities, 1.0},
      {"2 invariance", invariance, 30.0},
      {"3 decomposition", decomposition, 60.0},
      {"4 embedded norms", norms, 120.0},
      {"5 generator summands", summands, 120.0},
      {"6 martingale structure", martingales, 300.0},
      {"7 tightness", tightness, 600.0},
      {"8 overdamped limit", overdamped_limit, 1200.0},
      {"9 unitary equivalence", rescaling, 600.0},
      {"10 singular potential", singular, 600.0},
      {"11 determinism", determinism, 600.0},
  };
  int failures = 0;
  std::vector<std::string> only(argv + 1, argv + argc);
  for (const auto& c : all) {
    const std::string num = std::string(c.name).substr(0, std::string(c.name).find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), num) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool ok = o.ok && in_budget;
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.name << ": " << o.detail << " [" << fmt(secs) << " s"
              << (in_budget ? "" : ", over budget " + fmt(c.budget_s) + " s") << "]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
