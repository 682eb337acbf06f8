#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gshs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = gshs::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("gshs_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  fs::path p = dir / "config.yaml";
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::string kOu = R"(seed: 3
potentials:
  phi1: {kind: quadratic, dim: 1}
  phi2: {kind: quadratic, dim: 1}
eps_grid: [0.4]
sde:
  eps: 1
  t_end: 1
  dt: 0.001
  n_paths: 1000
  record_stride: 10
statistics:
  n_paths: 1000
  battery_paths: 1000
  permutations: 20
)";

}  // namespace

TEST_CASE("cli: validate exit codes") {
  auto dir = scratch("validate");
  CHECK(run({"validate", "--config", write_config(dir, kOu).string(), "--out", dir.string()}).code ==
        gshs::cli::kOk);
  CHECK(fs::exists(dir / "assumptions.csv"));
  std::string lin = kOu;
  lin.replace(lin.find("phi1: {kind: quadratic"), 22, "phi1: {kind: linear");
  auto r = run({"validate", "--config", write_config(dir, lin).string(), "--out", dir.string()});
  CHECK(r.code == gshs::cli::kCheckFailed);
  CHECK(r.out.find("(Phi1 2)") != std::string::npos);
}

TEST_CASE("cli: parse errors") {
  CHECK(run({"no-such-command"}).code == gshs::cli::kConfigError);
  CHECK(run({"validate", "--config", "/nonexistent.yaml"}).code == gshs::cli::kConfigError);
  auto dir = scratch("parse");
  auto bad = write_config(dir, "seed: 1\nunknown_key: 2\n");
  auto r = run({"validate", "--config", bad.string(), "--out", dir.string()});
  CHECK(r.code == gshs::cli::kConfigError);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("cli: refusals and --force") {
  auto dir = scratch("refuse");
  std::string stiff = kOu;
  // dt = 1e-3 > eps^2 / 2 for the splitting scheme; its exact OU substep
  // keeps the forced run stable.
  stiff.replace(stiff.find("eps: 1\n"), 7, "eps: 0.04\n");
  auto cfg = write_config(dir, stiff);
  CHECK(run({"simulate", "--config", cfg.string(), "--out", dir.string()}).code == gshs::cli::kRefused);
  auto forced = run({"simulate", "--config", cfg.string(), "--out", dir.string(), "--force"});
  CHECK(forced.code == gshs::cli::kOk);
  CHECK(forced.err.find("warning") != std::string::npos);

  std::string lin = kOu;
  lin.replace(lin.find("phi1: {kind: quadratic"), 22, "phi1: {kind: linear");
  cfg = write_config(dir, lin);
  auto r = run({"simulate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == gshs::cli::kRefused);
  CHECK(r.err.find("(Phi1 2)") != std::string::npos);
}

TEST_CASE("cli: simulate is byte-identical across worker counts") {
  auto a = scratch("sim1"), b = scratch("sim8");
  auto cfg = write_config(a, kOu);
  CHECK(run({"simulate", "--config", cfg.string(), "--out", a.string(), "--workers", "1", "--csv"}).code == 0);
  CHECK(run({"simulate", "--config", cfg.string(), "--out", b.string(), "--workers", "8"}).code == 0);
  const auto x = slurp(a / "ensemble.bin"), y = slurp(b / "ensemble.bin");
  CHECK(!x.empty());
  CHECK(x == y);
  CHECK(fs::exists(a / "ensemble.csv"));
  auto c = scratch("sim_seed");
  CHECK(run({"simulate", "--config", cfg.string(), "--out", c.string(), "--seed", "4"}).code == 0);
  CHECK(slurp(c / "ensemble.bin") != x);
}

TEST_CASE("cli: martingale negative control fails") {
  auto dir = scratch("mart");
  auto cfg = write_config(dir, kOu);
  CHECK(run({"martingale", "--config", cfg.string(), "--out", dir.string(), "--no-compensator"}).code ==
        gshs::cli::kCheckFailed);
  CHECK(fs::exists(dir / "martingale_zscores.csv"));
}

TEST_CASE("cli: single-entry eps grid skips the monotonicity check") {
  auto dir = scratch("limit");
  auto cfg = write_config(dir, kOu);
  auto r = run({"overdamped-limit", "--config", cfg.string(), "--out", dir.string()});
  CHECK((r.code == gshs::cli::kOk || r.code == gshs::cli::kCheckFailed));
  const auto checks = slurp(dir / "overdamped_limit_checks.csv");
  CHECK(checks.find("skipped") != std::string::npos);
  CHECK(fs::exists(dir / "overdamped_limit.csv"));

  auto re = run({"report", "--input", (dir / "overdamped_limit.csv").string(), "--out", dir.string()});
  CHECK(re.code == gshs::cli::kOk);
  CHECK(fs::exists(dir / "overdamped_limit.svg"));
}

TEST_CASE("cli: invariance subcommand") {
  auto dir = scratch("inv");
  std::string body = kOu + "semigroup:\n  bump_center: [0.2]\n  bump_radius: 0.5\n";
  auto cfg = write_config(dir, body);
  CHECK(run({"invariance", "--config", cfg.string(), "--out", dir.string()}).code == gshs::cli::kOk);
  CHECK(fs::exists(dir / "invariance.csv"));
}
