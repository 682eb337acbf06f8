#include "gshs/assumptions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "gshs/csv.hpp"
#include "gshs/error.hpp"
#include "gshs/measures.hpp"
#include "gshs/rng.hpp"

namespace gshs {

const char* to_string(AssumptionStatus s) {
  switch (s) {
    case AssumptionStatus::Verified: return "verified";
    case AssumptionStatus::Violated: return "violated";
    case AssumptionStatus::NotMachineCheckable: return "not-machine-checkable";
  }
  return "not-machine-checkable";
}

const std::vector<std::string>& assumption_labels() {
  static const std::vector<std::string> labels = [] {
    std::vector<std::string> v;
    for (int i = 1; i <= 9; ++i) v.push_back("(Phi1 " + std::to_string(i) + ")");
    for (int i = 1; i <= 11; ++i) v.push_back("(Phi2 " + std::to_string(i) + ")");
    return v;
  }();
  return labels;
}

const AssumptionEntry& AssumptionReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  fail(ErrorKind::InvalidInput, "no assumption entry " + name);
}

bool AssumptionReport::has_violation() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const auto& e) { return e.status == AssumptionStatus::Violated; });
}

std::vector<std::string> AssumptionReport::violations() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.status == AssumptionStatus::Violated) out.push_back(e.name);
  return out;
}

std::string AssumptionReport::to_csv(std::uint64_t config_hash) const {
  std::string out = csv_row({"name", "status", "evidence", "notes"});
  for (const auto& e : entries) {
    std::string ev;
    for (std::size_t i = 0; i < e.evidence.size(); ++i) {
      if (i) ev += ';';
      ev += e.evidence[i].first + "=" + format_double(e.evidence[i].second);
    }
    out += csv_row({e.name, to_string(e.status), ev, e.notes});
  }
  out += config_hash_line(config_hash) + "\r\n";
  return out;
}

std::vector<std::vector<double>> probe_grid(std::size_t d, double half, std::uint64_t seed) {
  std::vector<std::vector<double>> pts;
  if (d == 1) {
    const std::size_t n = 20001;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({-half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1)});
  } else if (d == 2) {
    const std::size_t n = 301;
    pts.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        pts.push_back({-half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1),
                       -half + 2.0 * half * static_cast<double>(j) / static_cast<double>(n - 1)});
  } else {
    Rng rng(derive_seed(seed, "probe"), d);
    const std::size_t n = 200000;
    pts.reserve(n + 1);
    pts.emplace_back(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(d);
      for (auto& c : p) c = half * (2.0 * rng.uniform() - 1.0);
      pts.push_back(std::move(p));
    }
  }
  return pts;
}

namespace {

using Status = AssumptionStatus;

double grad_norm(const PotentialSpec& phi, std::span<const double> p) {
  std::array<double, kMaxDim> g{};
  phi.grad_at(p, std::span<double>(g.data(), phi.dim()));
  double s = 0.0;
  for (std::size_t i = 0; i < phi.dim(); ++i) s += g[i] * g[i];
  return std::sqrt(s);
}

struct ProbeSummary {
  std::size_t finite = 0;
  std::size_t infinite = 0;
  double min_value = kInf;
  double max_grad = 0.0;
  bool nonfinite_grad = false;
};

ProbeSummary summarize(const PotentialSpec& phi, const std::vector<std::vector<double>>& pts) {
  ProbeSummary s;
  for (const auto& p : pts) {
    double v = phi.value_at(p);
    if (!phi.finite_domain(p) || !std::isfinite(v)) {
      ++s.infinite;
      continue;
    }
    ++s.finite;
    s.min_value = std::min(s.min_value, v);
    double g = grad_norm(phi, p);
    if (!std::isfinite(g)) s.nonfinite_grad = true;
    else s.max_grad = std::max(s.max_grad, g);
  }
  return s;
}

// Bounded from below: a certified bound must hold on all probes; without
// one, the probe minimum must stabilise as the probe box grows.
AssumptionEntry bounded_below(const std::string& name, const PotentialSpec& phi,
                              const ProbeSummary& base, const ValidationOptions& opts) {
  AssumptionEntry e{name, Status::Verified, {}, ""};
  if (base.finite == 0) {
    e.status = Status::Violated;
    e.notes = "no probe point in the finite domain";
    return e;
  }
  const double lb = phi.lower_bound();
  e.evidence.push_back({"probe_min", base.min_value});
  if (std::isfinite(lb)) {
    e.evidence.push_back({"certified_bound", lb});
    if (base.min_value < lb - 1e-12 * (1.0 + std::abs(lb))) {
      e.status = Status::Violated;
      e.notes = "a probe value lies below the certified lower bound";
    } else {
      e.notes = "certified lower bound holds on all probes";
    }
    return e;
  }
  double prev = base.min_value;
  for (double half : {4.0 * opts.probe_half_width, 16.0 * opts.probe_half_width}) {
    auto s = summarize(phi, probe_grid(phi.dim(), half, opts.seed));
    e.evidence.push_back({"probe_min_half_width_" + format_double(half), s.min_value});
    if (s.min_value < prev - 1e-6 * (1.0 + std::abs(prev))) {
      e.status = Status::Violated;
      e.notes = "probe minimum keeps decreasing as the probe box grows (unbounded below)";
      return e;
    }
    prev = std::min(prev, s.min_value);
  }
  e.notes = "no certified bound; probe minimum stable under box growth";
  return e;
}

// Compact used for local integrability checks: the truncation box when the
// weight is confined, else [-10, 10]^d.
std::pair<std::vector<double>, std::vector<double>> local_compact(const PotentialSpec& phi,
                                                                  const QuadratureConfig& q) {
  const std::size_t d = phi.dim();
  auto box = truncation_box(phi, q);
  if (box) return {box->lo, box->hi};
  return {std::vector<double>(d, -10.0), std::vector<double>(d, 10.0)};
}

// Lebesgue integral of g over a compact, refined once; non-convergence is
// reported as numeric-failure naming the integral.
double local_integral(const std::string& what, std::size_t d, const std::vector<double>& lo,
                      const std::vector<double>& hi, const Integrand& g, const QuadratureConfig& q) {
  if (d >= 3) {
    std::vector<double> c(d);
    double half = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      c[k] = 0.5 * (lo[k] + hi[k]);
      half = std::max(half, 0.5 * (hi[k] - lo[k]));
    }
    Integrand boxed = [&](std::span<const double> p) {
      for (std::size_t k = 0; k < d; ++k)
        if (p[k] < lo[k] || p[k] > hi[k]) return 0.0;
      return g(p);
    };
    return integrate_monte_carlo(d, c, half / 2.0, boxed, q).value;
  }
  double a = integrate_box(lo, hi, g, 1e-7, q.max_depth);
  double b = integrate_box(lo, hi, g, 1e-9, q.max_depth + 2);
  if (!std::isfinite(b) || std::abs(a - b) > 1e-5 * std::max(std::abs(b), 1e-300))
    fail(ErrorKind::NumericFailure, what + ": quadrature refinements disagree (" + format_double(a) +
                                        " vs " + format_double(b) + ")");
  return b;
}

AssumptionEntry moment_entry(const std::string& name, const GibbsMeasure& mu,
                             std::vector<std::pair<std::string, MomentSelector>> sels) {
  AssumptionEntry e{name, Status::Verified, {}, ""};
  for (const auto& [key, sel] : sels) {
    MomentResult r = moment(mu, sel);
    if (r.finite) {
      e.evidence.push_back({key, r.value});
    } else {
      e.status = Status::Violated;
      e.evidence.push_back({key, kInf});
      if (!e.notes.empty()) e.notes += "; ";
      e.notes += key + ": " + r.note;
    }
  }
  if (e.status == Status::Verified) e.notes = "normalized moment finite under domain refinement";
  return e;
}

AssumptionEntry finite_measure(const std::string& name, const PotentialSpec& phi,
                               const GibbsMeasure& mu, const QuadratureConfig& q) {
  AssumptionEntry e{name, Status::Verified, {}, ""};
  if (!truncation_box(phi, q)) {
    e.status = Status::Violated;
    e.notes = "Gibbs weight is not confined by any probe box up to half-width 1e4";
    return e;
  }
  try {
    e.evidence.push_back({"log_Z", mu.log_normalization()});
  } catch (const Error& err) {
    fail(ErrorKind::NumericFailure, name + ": " + err.what());
  }
  e.notes = "normalization converged under refinement";
  return e;
}

}  // namespace

AssumptionReport validate_assumptions(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                      const ValidationOptions& opts) {
  require(phi1 && phi2, ErrorKind::InvalidParameter, "validation needs both potentials");
  require(phi1.dim() == phi2.dim(), ErrorKind::DimensionMismatch, "potential dimensions differ");
  const std::size_t d = phi1.dim();
  const auto& q = opts.quadrature;
  AssumptionReport rep;
  rep.phi1_id = phi1.name();
  rep.phi2_id = phi2.name();
  auto probes = probe_grid(d, opts.probe_half_width, opts.seed);
  const ProbeSummary s1 = summarize(phi1, probes);
  const ProbeSummary s2 = summarize(phi2, probes);
  GibbsMeasure mu1 = GibbsMeasure::position(phi1, q);
  GibbsMeasure mu2 = GibbsMeasure::velocity(phi2, q);
  const bool confined1 = truncation_box(phi1, q).has_value();
  const bool confined2 = truncation_box(phi2, q).has_value();

  // (Phi1 1): gradient bounded on probed compacts of {Phi1 < inf}.
  {
    AssumptionEntry e{"(Phi1 1)", Status::Verified, {}, ""};
    e.evidence.push_back({"max_grad_on_probes", s1.max_grad});
    e.evidence.push_back({"singular_probes", static_cast<double>(s1.infinite)});
    if (s1.finite == 0 || s1.nonfinite_grad) {
      e.status = Status::Violated;
      e.notes = "gradient not finite on probed compacts";
    } else if (phi1.singular()) {
      e.notes = "verified on probed compacts of {Phi1 < inf}; singular set present, so the "
                "real-valued form is replaced by (Phi1 2)-(Phi1 4)";
    } else if (s1.infinite > 0) {
      e.status = Status::Violated;
      e.notes = "Phi1 takes the value +inf on probes";
    } else {
      e.notes = "verified on probed compacts (not a global proof)";
    }
    rep.entries.push_back(std::move(e));
  }
  rep.entries.push_back(bounded_below("(Phi1 2)", phi1, s1, opts));
  // (Phi1 3): e^{-Phi1} continuous, i.e. it vanishes when approaching the singular set.
  {
    AssumptionEntry e{"(Phi1 3)", Status::Verified, {}, ""};
    if (!phi1.singular()) {
      e.notes = s1.infinite == 0 ? "Phi1 finite and differentiable on all probes"
                                 : "Phi1 infinite on probes without a singularity flag";
      if (s1.infinite > 0) e.status = Status::Violated;
    } else {
      const double ref = std::isfinite(s1.min_value) ? s1.min_value : 0.0;
      double worst = 0.0;
      std::size_t near = 0;
      Rng rng(derive_seed(opts.seed, "near-singular"), d);
      for (double t : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
        for (int k = 0; k < 64; ++k) {
          std::vector<double> p(d);
          double nrm = 0.0;
          for (auto& c : p) {
            c = rng.normal();
            nrm += c * c;
          }
          for (auto& c : p) c *= t / std::sqrt(nrm);
          if (d == 1) p[0] = std::abs(p[0]) * (k % 2 ? 1.0 : -1.0);
          if (!phi1.finite_domain(p)) continue;
          if (phi1.distance_to_singularity(p) > 1e-2) continue;
          ++near;
          double v = phi1.value_at(p);
          worst = std::max(worst, std::isfinite(v) ? std::exp(ref - v) : 0.0);
        }
      }
      e.evidence.push_back({"near_singular_probes", static_cast<double>(near)});
      e.evidence.push_back({"max_relative_weight_near_singularity", worst});
      if (worst > 1e-12) {
        e.status = Status::Violated;
        e.notes = "e^{-Phi1} does not vanish at the singular set";
      } else {
        e.notes = near ? "e^{-Phi1} -> 0 approaching the singular set"
                       : "no finite probes within 1e-2 of the singular set; continuity on probed domain";
      }
    }
    rep.entries.push_back(std::move(e));
  }
  // (Phi1 4)^q, q = 2 and 4: local integrability of |grad Phi1|^q e^{-Phi1}.
  {
    AssumptionEntry e{"(Phi1 4)", Status::Verified, {}, ""};
    auto [lo, hi] = local_compact(phi1, q);
    const double shift = std::isfinite(s1.min_value) ? s1.min_value : 0.0;
    for (int qq : {2, 4}) {
      Integrand g = [&, qq](std::span<const double> p) {
        double v = phi1.value_at(p);
        if (!std::isfinite(v)) return 0.0;
        double w = std::exp(shift - v);
        if (w == 0.0) return 0.0;
        return std::pow(grad_norm(phi1, p), qq) * w;
      };
      double val = local_integral("(Phi1 4)^" + std::to_string(qq), d, lo, hi, g, q);
      e.evidence.push_back({"q" + std::to_string(qq) + "_local_integral_shifted", val});
      if (!std::isfinite(val)) e.status = Status::Violated;
    }
    e.notes = "checked for q = 2 and q = 4 on the truncation box of e^{-Phi1}";
    rep.entries.push_back(std::move(e));
  }
  rep.entries.push_back({"(Phi1 5)", Status::NotMachineCheckable, {},
                         "semigroup generation (m-dissipativity) is proof content"});
  rep.entries.push_back(finite_measure("(Phi1 6)", phi1, mu1, q));
  auto unconfined = [](const std::string& name, const char* which) {
    return AssumptionEntry{name, Status::Violated, {},
                           std::string("requires a finite Gibbs measure of ") + which};
  };
  if (confined1) {
    rep.entries.push_back(moment_entry("(Phi1 7)", mu1, {{"grad2", {MomentKind::GradPhi1, 2}}}));
    rep.entries.push_back(moment_entry(
        "(Phi1 8)", mu1, {{"x2", {MomentKind::PositionPower, 2}}, {"x4", {MomentKind::PositionPower, 4}}}));
    rep.entries.push_back(moment_entry("(Phi1 9)", mu1, {{"grad4", {MomentKind::GradPhi1, 4}}}));
  } else {
    for (const char* n : {"(Phi1 7)", "(Phi1 8)", "(Phi1 9)"}) rep.entries.push_back(unconfined(n, "Phi1"));
  }

  // (Phi2 1): {Phi2 < inf} nonempty and open (finite probes keep a finite neighbourhood).
  {
    AssumptionEntry e{"(Phi2 1)", Status::Verified, {}, ""};
    std::size_t boundary = 0;
    if (s2.finite == 0) {
      e.status = Status::Violated;
      e.notes = "{Phi2 < inf} has no probe point";
    } else {
      std::vector<double> p2(d);
      for (std::size_t k = 0; k < probes.size(); k += std::max<std::size_t>(1, probes.size() / 2000)) {
        const auto& p = probes[k];
        if (!phi2.finite_domain(p)) continue;
        for (std::size_t i = 0; i < d; ++i) {
          for (double s : {-1e-7, 1e-7}) {
            p2 = p;
            p2[i] += s;
            if (!phi2.finite_domain(p2)) ++boundary;
          }
        }
      }
      e.notes = boundary ? "finite probes touch the singular set at distance 1e-7"
                         : "nonempty; finite probes have finite neighbourhoods";
      if (boundary) e.status = Status::Violated;
    }
    e.evidence.push_back({"finite_probes", static_cast<double>(s2.finite)});
    rep.entries.push_back(std::move(e));
  }
  {
    AssumptionEntry e = bounded_below("(Phi2 2)", phi2, s2, opts);
    if (e.status == Status::Verified) {
      auto [lo, hi] = local_compact(phi2, q);
      Integrand g = [&](std::span<const double> p) {
        double v = phi2.value_at(p);
        return std::isfinite(v) ? std::abs(v) : 0.0;
      };
      e.evidence.push_back({"local_abs_integral", local_integral("(Phi2 2) local integrability", d, lo, hi, g, q)});
      e.notes += "; locally integrable on the truncation box";
    }
    rep.entries.push_back(std::move(e));
  }
  {
    AssumptionEntry e{"(Phi2 3)", Status::Verified, {}, ""};
    auto [lo, hi] = local_compact(phi2, q);
    Integrand g2 = [&](std::span<const double> p) {
      if (!phi2.finite_domain(p)) return 0.0;
      double g = grad_norm(phi2, p);
      return g * g;
    };
    Integrand h1 = [&](std::span<const double> p) {
      if (!phi2.finite_domain(p)) return 0.0;
      std::array<double, kMaxDim> h{};
      phi2.hessian_diag_at(p, std::span<double>(h.data(), d));
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += std::abs(h[i]);
      return s;
    };
    double a = local_integral("(Phi2 3) |grad Phi2|^2", d, lo, hi, g2, q);
    double b = local_integral("(Phi2 3) |d_ii Phi2|", d, lo, hi, h1, q);
    e.evidence.push_back({"local_grad2", a});
    e.evidence.push_back({"local_abs_second_derivatives", b});
    if (!std::isfinite(a) || !std::isfinite(b)) e.status = Status::Violated;
    e.notes = "Lebesgue integrals over the truncation box of e^{-Phi2}";
    rep.entries.push_back(std::move(e));
  }
  rep.entries.push_back({"(Phi2 4)", Status::NotMachineCheckable, {},
                         "essential self-adjointness of the velocity operator is proof content"});
  {
    GrowthConstants gc = opts.growth.value_or(GrowthConstants{static_cast<double>(d) + 2.0, 1.0});
    std::vector<std::vector<double>> finite_probes;
    for (const auto& p : probes)
      if (phi2.finite_domain(p)) finite_probes.push_back(p);
    AssumptionEntry e{"(Phi2 5)", Status::Verified, {}, ""};
    e.evidence.push_back({"K", gc.K});
    e.evidence.push_back({"alpha", gc.alpha});
    if (finite_probes.empty()) {
      e.status = Status::Violated;
      e.notes = "no probes in the finite domain";
    } else {
      auto g = check_growth_condition(phi2, gc, finite_probes);
      e.evidence.push_back({"max_violation", g.max_violation});
      e.status = g.verified ? Status::Verified : Status::Violated;
      e.notes = opts.growth ? "user-supplied constants" : "default candidate constants K = d + 2, alpha = 1";
    }
    rep.entries.push_back(std::move(e));
  }
  {
    AssumptionEntry e{"(Phi2 6)", Status::Verified, {}, ""};
    std::size_t mismatches = 0;
    Rng rng(derive_seed(opts.seed, "symmetry"), d);
    std::vector<double> p(d), m(d);
    std::array<double, kMaxDim> g1{}, g2{};
    for (int k = 0; k < 1000; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        p[i] = 5.0 * (2.0 * rng.uniform() - 1.0);
        m[i] = -p[i];
      }
      if (!phi2.finite_domain(p) && !phi2.finite_domain(m)) continue;
      bool ok = phi2.value_at(p) == phi2.value_at(m);
      if (ok && phi2.finite_domain(p)) {
        phi2.grad_at(p, std::span<double>(g1.data(), d));
        phi2.grad_at(m, std::span<double>(g2.data(), d));
        for (std::size_t i = 0; i < d; ++i) ok = ok && g1[i] == -g2[i];
        ok = ok && phi2.laplacian_at(p) == phi2.laplacian_at(m);
      }
      if (!ok) ++mismatches;
    }
    e.evidence.push_back({"mismatched_pairs", static_cast<double>(mismatches)});
    if (mismatches) {
      e.status = Status::Violated;
      e.notes = "Phi2(v) != Phi2(-v) on probe pairs";
    } else {
      e.notes = phi2.symmetric() ? "symmetric flag set; exact equality on 1000 probe pairs"
                                 : "exact equality on 1000 probe pairs (symmetric flag not set)";
    }
    rep.entries.push_back(std::move(e));
  }
  rep.entries.push_back(finite_measure("(Phi2 7)", phi2, mu2, q));
  if (confined2)
    rep.entries.push_back(moment_entry("(Phi2 8)", mu2, {{"grad2", {MomentKind::GradPhi2, 2}}}));
  else
    rep.entries.push_back(unconfined("(Phi2 8)", "Phi2"));
  {
    AssumptionEntry e{"(Phi2 9)", Status::Verified, {}, ""};
    e.evidence.push_back({"singular_probes", static_cast<double>(s2.infinite)});
    if (phi2.singular() || s2.infinite > 0) {
      e.status = Status::Violated;
      e.notes = "Phi2 has a singular set";
    } else {
      e.notes = "Phi2 finite on all probes and not flagged singular";
    }
    rep.entries.push_back(std::move(e));
  }
  if (confined2) {
    rep.entries.push_back(moment_entry(
        "(Phi2 10)", mu2, {{"v2", {MomentKind::VelocityPower, 2}}, {"v4", {MomentKind::VelocityPower, 4}}}));
    rep.entries.push_back(moment_entry("(Phi2 11)", mu2, {{"grad4", {MomentKind::GradPhi2, 4}}}));
  } else {
    rep.entries.push_back(unconfined("(Phi2 10)", "Phi2"));
    rep.entries.push_back(unconfined("(Phi2 11)", "Phi2"));
  }
  return rep;
}

}  // namespace gshs
