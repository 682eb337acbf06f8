#include "gshs/report.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>

#include "gshs/csv.hpp"
#include "gshs/error.hpp"

namespace gshs {

bool ConvergenceReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.skipped || c.passed; });
}

std::size_t ConvergenceReport::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  require(it != columns.end(), ErrorKind::InvalidInput, "report has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> ConvergenceReport::column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

void ConvergenceReport::add_check(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, false, std::move(detail)});
}

void ConvergenceReport::skip_check(std::string name, std::string why) {
  checks.push_back({std::move(name), false, true, std::move(why)});
}

std::string ConvergenceReport::to_csv(std::uint64_t config_hash) const {
  std::string out = csv_row(columns);
  for (const auto& r : rows) {
    std::vector<std::string> f;
    f.reserve(r.size());
    for (double v : r) f.push_back(format_double(v));
    out += csv_row(f);
  }
  for (const auto& n : notes) out += "# note: " + n + "\r\n";
  out += config_hash_line(config_hash) + "\r\n";
  return out;
}

std::string ConvergenceReport::checks_csv(std::uint64_t config_hash) const {
  std::string out = csv_row({"check", "status", "detail"});
  for (const auto& c : checks)
    out += csv_row({c.name, c.skipped ? "skipped" : (c.passed ? "pass" : "fail"), c.detail});
  out += config_hash_line(config_hash) + "\r\n";
  return out;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0); }
  double t(double v) const { return log ? std::log10(v) : v; }
  void fit(double a, double b) {
    lo = t(a);
    hi = t(b);
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string tick_label(double v, bool log) {
  std::ostringstream os;
  os.precision(3);
  os << (log ? std::pow(10.0, v) : v);
  return os.str();
}

constexpr double kBig = std::numeric_limits<double>::infinity();

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
  const double W = 640, H = 420, L = 70, R = 160, T = 40, B = 50;
  Axis ax{log_x}, ay{log_y};
  double xmin = kBig, xmax = -kBig, ymin = kBig, ymax = -kBig;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      auto band = [&](const std::vector<double>& b) {
        if (i < b.size() && ay.usable(b[i])) {
          ymin = std::min(ymin, b[i]);
          ymax = std::max(ymax, b[i]);
        }
      };
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      band(s.lo);
      band(s.hi);
    }
  }
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << xml_escape(title) << "</text>\n";
  if (!(xmin <= xmax)) {
    o << "<text x=\"" << W / 2 << "\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no plottable data</text>\n</svg>\n";
    return o.str();
  }
  ax.fit(xmin, xmax);
  ay.fit(ymin, ymax);
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double v) { return L + (ax.t(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return T + ph - (ay.t(v) - ay.lo) / (ay.hi - ay.lo) * ph; };
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.lo + (ax.hi - ax.lo) * k / 4.0, fy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    const double X = L + pw * k / 4.0, Y = T + ph - ph * k / 4.0;
    o << "<text x=\"" << X << "\" y=\"" << T + ph + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(fx, ax.log)
      << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << Y + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(fy, ay.log)
      << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << T + ph / 2 << "\" transform=\"rotate(-90 16 " << T + ph / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(ylabel)
    << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* col = kColors[si % std::size(kColors)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.lo.size() == n && s.hi.size() == n && n > 0) {
      std::ostringstream poly;
      for (std::size_t i = 0; i < n; ++i)
        if (ax.usable(s.x[i]) && ay.usable(s.hi[i])) poly << px(s.x[i]) << ',' << py(s.hi[i]) << ' ';
      for (std::size_t i = n; i-- > 0;)
        if (ax.usable(s.x[i]) && ay.usable(s.lo[i])) poly << px(s.x[i]) << ',' << py(s.lo[i]) << ' ';
      o << "<polygon points=\"" << poly.str() << "\" fill=\"" << col << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::ostringstream line;
    for (std::size_t i = 0; i < n; ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) line << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    o << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.8\"/>\n";
    for (std::size_t i = 0; i < n && n <= 50; ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i]))
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    const double ly = T + 14 + 18.0 * static_cast<double>(si);
    o << "<line x1=\"" << L + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw + 35 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace gshs
