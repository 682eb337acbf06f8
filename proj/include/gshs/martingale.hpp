#pragma once

#include <span>
#include <string>
#include <vector>

#include "gshs/dynamics.hpp"
#include "gshs/test_functions.hpp"

namespace gshs {

enum class GeneratorKind { Gshs, Overdamped };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Gshs;
  PotentialSpec phi1;
  PotentialSpec phi2;
  double eps = 1.0;
};

GeneratorSpec gshs_generator(PotentialSpec phi1, PotentialSpec phi2, double eps);
GeneratorSpec overdamped_generator(PotentialSpec phi1);

// Per-path real series on the recorded grid.
struct PathSeries {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::vector<double> values;  // [path][time]
  std::vector<std::string> warnings;

  std::size_t grid() const { return times.size(); }
  double at(std::size_t path, std::size_t k) const { return values[path * grid() + k]; }
  std::span<const double> path(std::size_t i) const { return {values.data() + i * grid(), grid()}; }
};

struct MartingaleOptions {
  bool include_compensator = true;  // false: negative control f(Z_t) - f(Z_0)
  double resolution_tol = 1e-3;
  std::size_t workers = 0;
};

// int_0^t g(Z_s) ds by the trapezoid rule on the recorded grid, with a
// Richardson estimate (full grid vs every other point) of its error.
PathSeries time_integral(const PathEnsemble& paths,
                         const std::function<double(std::span<const double>)>& g,
                         double resolution_tol, std::size_t workers = 0);

// int_0^t L f(Z_s) ds
PathSeries compensator(const PathEnsemble& paths, const TestFunction& f, const GeneratorSpec& gen,
                       const MartingaleOptions& opts = {});

// M_t = f(Z_t) - f(Z_0) - int_0^t L f(Z_s) ds
PathSeries martingale_process(const PathEnsemble& paths, const TestFunction& f,
                              const GeneratorSpec& gen, const MartingaleOptions& opts = {});

// int_0^t (L(f^2) - 2 f L f)(Z_s) ds
PathSeries quadratic_compensator(const PathEnsemble& paths, const TestFunction& f,
                                 const GeneratorSpec& gen, const MartingaleOptions& opts = {});

}  // namespace gshs
