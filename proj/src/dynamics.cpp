#include "gshs/dynamics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "gshs/error.hpp"
#include "gshs/parallel.hpp"
#include "gshs/rng.hpp"

namespace gshs {

const char* to_string(Scheme s) {
  return s == Scheme::EulerMaruyama ? "euler-maruyama" : "splitting";
}

const char* to_string(Guard g) {
  switch (g) {
    case Guard::None: return "none";
    case Guard::RejectStep: return "reject-step";
    case Guard::ShrinkStep: return "shrink-step";
  }
  return "none";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "euler-maruyama") return Scheme::EulerMaruyama;
  if (s == "splitting") return Scheme::Splitting;
  fail(ErrorKind::InvalidParameter, "unknown scheme '" + s + "'");
}

Guard parse_guard(const std::string& s) {
  if (s == "none") return Guard::None;
  if (s == "reject-step") return Guard::RejectStep;
  if (s == "shrink-step") return Guard::ShrinkStep;
  fail(ErrorKind::InvalidParameter, "unknown singularity guard '" + s + "'");
}

namespace {

std::size_t checked_ratio(double num, double den, const char* what) {
  double r = num / den;
  double n = std::round(r);
  require(n >= 1 && std::abs(r - n) <= 1e-9 * n, ErrorKind::InvalidParameter,
          std::string(what) + " must be an integer");
  return static_cast<std::size_t>(n);
}

}  // namespace

std::size_t step_count(const SdeConfig& cfg) { return checked_ratio(cfg.t_end, cfg.dt, "t_end/dt"); }

std::size_t noise_substeps(const SdeConfig& cfg) {
  if (cfg.noise_dt <= 0.0) return 1;
  return checked_ratio(cfg.dt, cfg.noise_dt, "dt/noise_dt");
}

void validate_sde_config(const SdeConfig& cfg) {
  require(cfg.eps > 0 && std::isfinite(cfg.eps), ErrorKind::InvalidParameter, "eps must be positive");
  require(cfg.t_end > 0 && cfg.dt > 0, ErrorKind::InvalidParameter, "t_end and dt must be positive");
  require(cfg.n_paths >= 1, ErrorKind::InvalidParameter, "n_paths must be at least 1");
  require(cfg.record_stride >= 1, ErrorKind::InvalidParameter, "record_stride must be at least 1");
  require(cfg.guard_distance >= 0, ErrorKind::InvalidParameter, "guard distance must be nonnegative");
  std::size_t n = step_count(cfg);
  require(n % cfg.record_stride == 0, ErrorKind::InvalidParameter,
          "t_end/dt must be an integer multiple of record_stride");
  noise_substeps(cfg);
}

std::optional<std::string> stiffness_violation(const SdeConfig& cfg, const PotentialSpec& phi2) {
  if (cfg.eps >= 1.0) return std::nullopt;
  const bool exact_ou = cfg.scheme == Scheme::Splitting && phi2 && phi2.quadratic_stiffness();
  const double limit = cfg.eps * cfg.eps / (exact_ou ? 2.0 : 10.0);
  if (cfg.dt <= limit * (1.0 + 1e-12)) return std::nullopt;
  std::ostringstream os;
  os << "dt = " << cfg.dt << " exceeds the stiffness limit eps^2/" << (exact_ou ? 2 : 10) << " = "
     << limit << " at eps = " << cfg.eps
     << "; the (1/eps^2) velocity drift relaxes on a time scale eps^2 and the explicit step "
        "becomes unstable";
  return os.str();
}

std::size_t PathEnsemble::time_index(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * (1.0 + std::abs(t))) return k;
  fail(ErrorKind::InvalidInput, "time " + std::to_string(t) + " is not on the recorded grid");
}

namespace {

enum class StepStatus { Ok, Violation, NonFinite };

// Normals for the m-th noise substep of a step.
struct NoiseSource {
  virtual void normals(std::size_t m, std::span<double> out) = 0;
  virtual ~NoiseSource() = default;
};

struct GridNoise final : NoiseSource {
  const RandomStream& rs;
  std::uint64_t first_slot;
  GridNoise(const RandomStream& r, std::uint64_t s) : rs(r), first_slot(s) {}
  void normals(std::size_t m, std::span<double> out) override { rs.normals(first_slot + m, out); }
};

struct FreshNoise final : NoiseSource {
  Rng& rng;
  explicit FreshNoise(Rng& r) : rng(r) {}
  void normals(std::size_t, std::span<double> out) override {
    for (auto& z : out) z = rng.normal();
  }
};

class Integrator {
 public:
  Integrator(const PotentialSpec& phi1, const PotentialSpec* phi2, const SdeConfig& cfg)
      : phi1_(phi1), phi2_(phi2), cfg_(cfg), d_(phi1.dim()) {
    if (phi2_) kappa_ = phi2_->quadratic_stiffness();
  }

  bool overdamped() const { return phi2_ == nullptr; }

  // One step of size h from (x, v) with nsub noise substeps of size h/nsub.
  StepStatus step(double* x, double* v, double h, std::size_t nsub, NoiseSource& noise) const {
    const std::size_t d = d_;
    const double sub = h / static_cast<double>(nsub);
    std::array<double, kMaxDim> g{}, xi{};
    std::span<double> gs(g.data(), d), xs(xi.data(), d);
    if (overdamped()) {
      phi1_.grad_at(std::span<const double>(x, d), gs);
      std::array<double, kMaxDim> w{};
      for (std::size_t m = 0; m < nsub; ++m) {
        noise.normals(m, xs);
        for (std::size_t i = 0; i < d; ++i) w[i] += std::sqrt(sub) * xi[i];
      }
      for (std::size_t i = 0; i < d; ++i) x[i] += -h * g[i] + std::sqrt(2.0) * w[i];
      return check(x, nullptr);
    }
    const double eps = cfg_.eps;
    if (cfg_.scheme == Scheme::EulerMaruyama) {
      std::array<double, kMaxDim> g2{}, w{};
      phi1_.grad_at(std::span<const double>(x, d), gs);
      phi2_->grad_at(std::span<const double>(v, d), std::span<double>(g2.data(), d));
      for (std::size_t m = 0; m < nsub; ++m) {
        noise.normals(m, xs);
        for (std::size_t i = 0; i < d; ++i) w[i] += std::sqrt(sub) * xi[i];
      }
      for (std::size_t i = 0; i < d; ++i) {
        x[i] += (h / eps) * g2[i];
        v[i] += -(h / eps) * g[i] - (h / (eps * eps)) * g2[i] + (std::sqrt(2.0) / eps) * w[i];
      }
      return check(x, v);
    }
    // BAOAB: half kick, half drift, velocity OU part, half drift, half kick.
    const double half = 0.5 * h / eps;
    phi1_.grad_at(std::span<const double>(x, d), gs);
    for (std::size_t i = 0; i < d; ++i) v[i] -= half * g[i];
    phi2_->grad_at(std::span<const double>(v, d), gs);
    for (std::size_t i = 0; i < d; ++i) x[i] += half * g[i];
    if (kappa_) {
      const double k = *kappa_;
      const double a = std::exp(-k * sub / (eps * eps));
      const double s = std::sqrt((1.0 - a * a) / k);
      for (std::size_t m = 0; m < nsub; ++m) {
        noise.normals(m, xs);
        for (std::size_t i = 0; i < d; ++i) v[i] = a * v[i] + s * xi[i];
      }
    } else {
      for (std::size_t m = 0; m < nsub; ++m) {
        noise.normals(m, xs);
        phi2_->grad_at(std::span<const double>(v, d), gs);
        for (std::size_t i = 0; i < d; ++i)
          v[i] += -(sub / (eps * eps)) * g[i] + (std::sqrt(2.0 * sub) / eps) * xi[i];
      }
    }
    phi2_->grad_at(std::span<const double>(v, d), gs);
    for (std::size_t i = 0; i < d; ++i) x[i] += half * g[i];
    if (!phi1_.finite_domain(std::span<const double>(x, d))) return StepStatus::Violation;
    phi1_.grad_at(std::span<const double>(x, d), gs);
    for (std::size_t i = 0; i < d; ++i) v[i] -= half * g[i];
    return check(x, v);
  }

  StepStatus check(const double* x, const double* v) const {
    const std::size_t d = d_;
    bool finite = true;
    for (std::size_t i = 0; i < d; ++i) {
      finite = finite && std::isfinite(x[i]);
      if (v) finite = finite && std::isfinite(v[i]);
    }
    if (!finite) return phi1_.singular() ? StepStatus::Violation : StepStatus::NonFinite;
    std::span<const double> xs(x, d);
    if (!phi1_.finite_domain(xs)) return StepStatus::Violation;
    if (phi1_.singular() && phi1_.distance_to_singularity(xs) < cfg_.guard_distance)
      return StepStatus::Violation;
    if (v && !phi2_->finite_domain(std::span<const double>(v, d))) return StepStatus::Violation;
    return StepStatus::Ok;
  }

 private:
  const PotentialSpec& phi1_;
  const PotentialSpec* phi2_;
  const SdeConfig& cfg_;
  std::size_t d_;
  std::optional<double> kappa_;
};

std::string lineage(const SdeConfig& cfg) {
  std::ostringstream os;
  os << "philox4x32-10 key=seed(" << cfg.seed << ") stream=path counter=noise-slot noise_dt="
     << (cfg.noise_dt > 0 ? cfg.noise_dt : cfg.dt) << " guard-stream=derive(seed,\"guard\")";
  return os.str();
}

PathEnsemble run(const PotentialSpec& phi1, const PotentialSpec* phi2, std::span<const double> initial,
                 const SdeConfig& cfg, std::string init_label) {
  validate_sde_config(cfg);
  const std::size_t d = phi1.dim();
  const bool over = phi2 == nullptr;
  if (!over) {
    require(phi2->dim() == d, ErrorKind::DimensionMismatch, "potential dimensions differ");
    if (cfg.enforce_stiffness) {
      if (auto msg = stiffness_violation(cfg, *phi2)) fail(ErrorKind::InvalidParameter, *msg);
    }
  }
  PathEnsemble ens;
  ens.d = d;
  ens.has_velocity = !over;
  ens.n_paths = cfg.n_paths;
  ens.config = cfg;
  ens.phi1_id = phi1.name();
  ens.phi2_id = over ? "" : phi2->name();
  ens.init_label = std::move(init_label);
  ens.rng_lineage = lineage(cfg);
  const std::size_t sd = ens.state_dim();
  require(initial.size() == cfg.n_paths * sd, ErrorKind::DimensionMismatch,
          "initial states must have n_paths x state_dim entries");

  const std::size_t nsteps = step_count(cfg);
  const std::size_t nsub = noise_substeps(cfg);
  const std::size_t grid = nsteps / cfg.record_stride + 1;
  ens.times.resize(grid);
  for (std::size_t k = 0; k < grid; ++k)
    ens.times[k] = static_cast<double>(k * cfg.record_stride) * cfg.dt;
  ens.states.assign(cfg.n_paths * grid * sd, 0.0);

  Integrator integ(phi1, phi2, cfg);
  std::vector<GuardStats> stats(cfg.n_paths);
  const std::uint64_t guard_seed = derive_seed(cfg.seed, "guard");

  parallel_for(cfg.n_paths, resolve_workers(cfg.workers), [&](std::size_t b, std::size_t e) {
    std::array<double, 2 * kMaxDim> z{}, trial{};
    for (std::size_t path = b; path < e; ++path) {
      RandomStream rs(cfg.seed, path);
      Rng guard_rng(guard_seed, path);
      GuardStats& gs = stats[path];
      std::copy_n(initial.data() + path * sd, sd, z.data());
      double* x = z.data();
      double* v = over ? nullptr : z.data() + d;
      {
        auto st = integ.check(x, v);
        if (st != StepStatus::Ok)
          fail(ErrorKind::InvalidInput,
               "initial state of path " + std::to_string(path) + " is outside the admissible domain");
      }
      double* rec = ens.states.data() + path * grid * sd;
      std::copy_n(z.data(), sd, rec);
      for (std::size_t n = 0; n < nsteps; ++n) {
        trial = z;
        double* tx = trial.data();
        double* tv = over ? nullptr : trial.data() + d;
        GridNoise noise(rs, static_cast<std::uint64_t>(n) * nsub);
        StepStatus st = integ.step(tx, tv, cfg.dt, nsub, noise);
        const double t = static_cast<double>(n) * cfg.dt;
        if (st == StepStatus::NonFinite)
          fail(ErrorKind::NumericFailure, "non-finite state on path " + std::to_string(path) +
                                              " at t = " + std::to_string(t));
        if (st == StepStatus::Violation) {
          if (cfg.guard == Guard::None)
            fail(ErrorKind::PathBlowup, "path " + std::to_string(path) +
                                            " entered the singular guard band at t = " +
                                            std::to_string(t));
          bool recovered = false;
          FreshNoise fresh(guard_rng);
          if (cfg.guard == Guard::ShrinkStep) {
            for (int level = 1; level <= 20 && !recovered; ++level) {
              const std::size_t m = std::size_t{1} << level;
              const double h = cfg.dt / static_cast<double>(m);
              trial = z;
              bool ok = true;
              for (std::size_t j = 0; j < m && ok; ++j) {
                StepStatus s2 = integ.step(tx, tv, h, 1, fresh);
                if (s2 == StepStatus::NonFinite)
                  fail(ErrorKind::NumericFailure, "non-finite state on path " + std::to_string(path) +
                                                      " at t = " + std::to_string(t));
                ok = s2 == StepStatus::Ok;
              }
              if (ok) {
                recovered = true;
                ++gs.shrinks;
              }
            }
          }
          for (int attempt = 0; attempt < 100 && !recovered; ++attempt) {
            trial = z;
            ++gs.redraws;
            StepStatus s2 = integ.step(tx, tv, cfg.dt, nsub, fresh);
            if (s2 == StepStatus::NonFinite)
              fail(ErrorKind::NumericFailure, "non-finite state on path " + std::to_string(path) +
                                                  " at t = " + std::to_string(t));
            recovered = s2 == StepStatus::Ok;
          }
          if (!recovered) {
            ++gs.unrecovered;
            trial = z;
          }
        }
        z = trial;
        if ((n + 1) % cfg.record_stride == 0)
          std::copy_n(z.data(), sd, rec + ((n + 1) / cfg.record_stride) * sd);
      }
    }
  });
  for (const auto& s : stats) {
    ens.guard.shrinks += s.shrinks;
    ens.guard.redraws += s.redraws;
    ens.guard.unrecovered += s.unrecovered;
  }
  return ens;
}

}  // namespace

PathEnsemble simulate_gshs(const PotentialSpec& phi1, const PotentialSpec& phi2,
                           std::span<const double> initial, const SdeConfig& cfg, std::string init_label) {
  return run(phi1, &phi2, initial, cfg, std::move(init_label));
}

PathEnsemble simulate_gshs(const PotentialSpec& phi1, const PotentialSpec& phi2,
                           const InitialDistribution& init, const SdeConfig& cfg) {
  validate_sde_config(cfg);
  require(init.base().has_position() && init.base().has_velocity(), ErrorKind::InvalidParameter,
          "gsHs simulation needs an initial law on phase space");
  if (cfg.enforce_stiffness) {
    if (auto msg = stiffness_violation(cfg, phi2)) fail(ErrorKind::InvalidParameter, *msg);
  }
  SamplerOptions so;
  so.workers = resolve_workers(cfg.workers);
  auto pts = sample(init, cfg.n_paths, derive_seed(cfg.seed, "initial"), so);
  return run(phi1, &phi2, pts, cfg, init.label());
}

PathEnsemble simulate_overdamped(const PotentialSpec& phi1, std::span<const double> initial,
                                 const SdeConfig& cfg, std::string init_label) {
  return run(phi1, nullptr, initial, cfg, std::move(init_label));
}

PathEnsemble simulate_overdamped(const PotentialSpec& phi1, const InitialDistribution& init,
                                 const SdeConfig& cfg) {
  validate_sde_config(cfg);
  const auto& mu = init.base();
  require(mu.has_position(), ErrorKind::InvalidParameter, "overdamped simulation needs a position law");
  SamplerOptions so;
  so.workers = resolve_workers(cfg.workers);
  if (mu.has_velocity()) {
    // Use the position marginal of a phase-space law.
    auto pts = sample(init, cfg.n_paths, derive_seed(cfg.seed, "initial"), so);
    const std::size_t d = mu.d();
    std::vector<double> xs(cfg.n_paths * d);
    for (std::size_t i = 0; i < cfg.n_paths; ++i)
      std::copy_n(pts.data() + i * 2 * d, d, xs.data() + i * d);
    return run(phi1, nullptr, xs, cfg, init.label());
  }
  auto pts = sample(init, cfg.n_paths, derive_seed(cfg.seed, "initial"), so);
  return run(phi1, nullptr, pts, cfg, init.label());
}

}  // namespace gshs
