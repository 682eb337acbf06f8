#include <doctest.h>

#include <string>

#include "gshs/config.hpp"
#include "gshs/error.hpp"
#include "gshs/report.hpp"

using namespace gshs;

namespace {

const char* kOu = R"(seed: 7
potentials:
  phi1: {kind: quadratic, dim: 1, params: {k: 2.0}}
  phi2: {kind: quartic, dim: 1}
eps_grid: [0.5, 0.25]
sde:
  eps: 0.5
  t_end: 1
  dt: 0.001
  n_paths: 100
statistics:
  times: [0.5, 1.0]
  permutations: 50
)";

}  // namespace

TEST_CASE("config parses and round-trips through the canonical emission") {
  auto c = parse_config(kOu);
  CHECK(c.seed == 7);
  CHECK(c.sde.seed == 7);
  CHECK(c.phi1.kind == "quadratic");
  CHECK(c.phi1.params.at("k") == 2.0);
  CHECK(c.eps_grid == std::vector<double>{0.5, 0.25});
  CHECK(c.statistics.permutations == 50);
  auto again = parse_config(emit_config(c));
  CHECK(again == c);
  CHECK(config_hash(again) == config_hash(c));
}

TEST_CASE("config hash ignores workers and output but not the seed") {
  auto c = parse_config(kOu);
  auto w = c;
  w.workers = 8;
  w.sde.workers = 8;
  w.output = "elsewhere";
  CHECK(config_hash(w) == config_hash(c));
  w.seed = 8;
  CHECK(config_hash(w) != config_hash(c));
}

TEST_CASE("config errors carry line and column") {
  try {
    parse_config("seed: 1\nsde:\n  dt: 0.001\n  bogus: 3\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("potentials:\n  phi1: {kind: nonsense}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sde: {dt: -1}\n"), Error);
  CHECK_THROWS_AS(parse_config("seed: [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.yaml"), ConfigError);
}

TEST_CASE("report csv and checks") {
  ConvergenceReport r;
  r.title = "t";
  r.columns = {"eps", "value"};
  r.rows = {{0.5, 1.25}, {0.25, 0.5}};
  r.notes.push_back("a note");
  r.add_check("first", true, "fine");
  r.skip_check("second", "not applicable");
  CHECK(r.passed());
  CHECK(r.column("value") == std::vector<double>{1.25, 0.5});
  CHECK_THROWS_AS(r.column_index("missing"), Error);
  const std::string csv = r.to_csv(0xff);
  CHECK(csv.rfind("eps,value", 0) == 0);
  CHECK(csv.find("# note: a note") != std::string::npos);
  CHECK(csv.find("config_hash") != std::string::npos);
  const std::string checks = r.checks_csv(0xff);
  CHECK(checks.find("second,skipped") != std::string::npos);
  r.add_check("third", false, "broken");
  CHECK_FALSE(r.passed());
}

TEST_CASE("svg plots") {
  PlotSeries s{"d", {0.4, 0.2, 0.1}, {0.3, 0.1, 0.05}, {}, {}};
  const std::string svg = svg_plot("distance", "eps", "value", {s}, true, true);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  PlotSeries neg{"n", {1, 2}, {-1, -2}, {}, {}};
  CHECK(svg_plot("empty", "x", "y", {neg}, false, true).find("no plottable data") != std::string::npos);
}
