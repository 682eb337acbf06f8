#include "gshs/martingale.hpp"

#include <cmath>
#include <sstream>

#include "gshs/error.hpp"
#include "gshs/generator.hpp"
#include "gshs/parallel.hpp"

namespace gshs {

GeneratorSpec gshs_generator(PotentialSpec phi1, PotentialSpec phi2, double eps) {
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  return {GeneratorKind::Gshs, std::move(phi1), std::move(phi2), eps};
}

GeneratorSpec overdamped_generator(PotentialSpec phi1) {
  return {GeneratorKind::Overdamped, std::move(phi1), PotentialSpec{}, 1.0};
}

namespace {

void check_match(const PathEnsemble& paths, const TestFunction& f, const GeneratorSpec& gen) {
  if (gen.kind == GeneratorKind::Gshs) {
    require(paths.has_velocity, ErrorKind::InvalidInput, "gsHs generator needs phase-space paths");
    require(f.dim() == 2 * paths.d, ErrorKind::DimensionMismatch, "test function must live on R^{2d}");
  } else {
    require(!paths.has_velocity, ErrorKind::InvalidInput, "overdamped generator needs position paths");
    require(f.dim() == paths.d, ErrorKind::DimensionMismatch, "test function must live on R^d");
  }
}

double apply(const GeneratorSpec& gen, const TestFunction& f, std::span<const double> z) {
  return gen.kind == GeneratorKind::Gshs ? apply_gshs_generator(gen.phi1, gen.phi2, gen.eps, f, z)
                                         : apply_overdamped_generator(gen.phi1, f, z);
}

}  // namespace

PathSeries time_integral(const PathEnsemble& paths,
                         const std::function<double(std::span<const double>)>& g,
                         double resolution_tol, std::size_t workers) {
  PathSeries out;
  out.times = paths.times;
  out.n_paths = paths.n_paths;
  const std::size_t G = paths.grid();
  out.values.assign(paths.n_paths * G, 0.0);
  std::vector<double> err(paths.n_paths, 0.0), scale(paths.n_paths, 0.0);
  parallel_for(paths.n_paths, resolve_workers(workers), [&](std::size_t b, std::size_t e) {
    std::vector<double> gv(G);
    for (std::size_t p = b; p < e; ++p) {
      for (std::size_t k = 0; k < G; ++k) gv[k] = g(paths.state(p, k));
      double* row = out.values.data() + p * G;
      row[0] = 0.0;
      for (std::size_t k = 1; k < G; ++k)
        row[k] = row[k - 1] + 0.5 * (paths.times[k] - paths.times[k - 1]) * (gv[k] + gv[k - 1]);
      // Same integral on every other grid point, up to the last even index.
      std::size_t last = (G - 1) - ((G - 1) % 2);
      double coarse = 0.0;
      for (std::size_t k = 2; k <= last; k += 2)
        coarse += 0.5 * (paths.times[k] - paths.times[k - 2]) * (gv[k] + gv[k - 2]);
      if (last >= 2) err[p] = std::abs(row[last] - coarse) / 3.0;
      scale[p] = std::abs(row[G - 1]);
    }
  });
  double worst = 0.0, worst_scale = 0.0;
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    if (err[p] > worst) {
      worst = err[p];
      worst_scale = scale[p];
    }
  }
  if (worst > resolution_tol * std::max(1.0, worst_scale)) {
    std::ostringstream os;
    os << "resolution warning: trapezoid error estimate " << worst
       << " exceeds tolerance; record the paths on a finer grid";
    out.warnings.push_back(os.str());
  }
  return out;
}

PathSeries compensator(const PathEnsemble& paths, const TestFunction& f, const GeneratorSpec& gen,
                       const MartingaleOptions& opts) {
  check_match(paths, f, gen);
  return time_integral(
      paths, [&](std::span<const double> z) { return apply(gen, f, z); }, opts.resolution_tol,
      opts.workers);
}

PathSeries martingale_process(const PathEnsemble& paths, const TestFunction& f,
                              const GeneratorSpec& gen, const MartingaleOptions& opts) {
  check_match(paths, f, gen);
  PathSeries out;
  if (opts.include_compensator) {
    out = compensator(paths, f, gen, opts);
  } else {
    out.times = paths.times;
    out.n_paths = paths.n_paths;
    out.values.assign(paths.n_paths * paths.grid(), 0.0);
    out.warnings.push_back("negative control: compensator omitted");
  }
  const std::size_t G = paths.grid();
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    const double f0 = f.value(paths.state(p, 0));
    double* row = out.values.data() + p * G;
    row[0] = 0.0;
    for (std::size_t k = 1; k < G; ++k) row[k] = (f.value(paths.state(p, k)) - f0) - row[k];
  }
  return out;
}

PathSeries quadratic_compensator(const PathEnsemble& paths, const TestFunction& f,
                                 const GeneratorSpec& gen, const MartingaleOptions& opts) {
  check_match(paths, f, gen);
  const std::size_t d = paths.d;
  if (gen.kind == GeneratorKind::Gshs) {
    return time_integral(
        paths, [&](std::span<const double> z) { return carre_du_champ(gen.phi1, gen.phi2, f, z, gen.eps); },
        opts.resolution_tol, opts.workers);
  }
  return time_integral(
      paths,
      [&](std::span<const double> z) {
        std::array<double, kMaxDim> g{};
        f.gradient(z, std::span<double>(g.data(), d));
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += g[i] * g[i];
        return 2.0 * s;
      },
      opts.resolution_tol, opts.workers);
}

}  // namespace gshs
