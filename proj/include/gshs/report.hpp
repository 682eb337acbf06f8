#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gshs {

struct Check {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

// Per-eps table plus named pass/fail checks.
struct ConvergenceReport {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  // True when every non-skipped check passed.
  bool passed() const;
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  void add_check(std::string name, bool ok, std::string detail);
  void skip_check(std::string name, std::string why);

  // Header row, numeric rows, notes as "# note: ..." lines, then the
  // config-hash line.
  std::string to_csv(std::uint64_t config_hash) const;
  // Columns check,status,detail.
  std::string checks_csv(std::uint64_t config_hash) const;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> lo, hi;  // optional band, same length as y
};

// Standalone SVG line plot; log axes drop nonpositive values.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_x, bool log_y);

}  // namespace gshs
