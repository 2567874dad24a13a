#include "cli/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bboxlab::cli {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 190;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '-' && !out.empty() && out.back() == '-') out += ' ';
    out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

// Roughly five round-valued ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    for (double x : s.xs) xr.add(x);
    for (double y : s.ys) yr.add(y);
  }
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!plot.comment.empty()) os << "<!--\n" << comment_safe(plot.comment) << "-->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(plot.title) << "</text>\n";

  os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
     << kTop + ph << "\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + ph << "\"/>\n";
  os << "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  for (double t : ticks(xr.lo, xr.hi)) {
    const double x = px(t);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + ph << "\" x2=\"" << num(x) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>"
       << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << num(t) << "</text>\n";
  }
  for (double t : ticks(yr.lo, yr.hi)) {
    const double y = py(t);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft << "\" y2=\""
       << num(y) << "\" stroke=\"black\"/>"
       << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
       << num(t) << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(plot.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\""
     << " transform=\"rotate(-90 18 " << kTop + ph / 2 << ")\">" << escape(plot.y_label)
     << "</text>\n";

  os << "<g class=\"curves\" fill=\"none\" stroke-width=\"1.8\">\n";
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    os << "<polyline data-series=\"" << escape(s.name) << "\" stroke=\""
       << kPalette[i % std::size(kPalette)] << "\" points=\"";
    const std::size_t n = std::min(s.xs.size(), s.ys.size());
    bool first = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.xs[k]) || !std::isfinite(s.ys[k])) continue;
      os << (first ? "" : " ") << num(px(s.xs[k])) << ',' << num(py(s.ys[k]));
      first = false;
    }
    os << "\"/>\n";
  }
  os << "</g>\n<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(i);
    const double x = kLeft + pw + 15;
    os << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24 << "\" y2=\"" << y
       << "\" stroke=\"" << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << x + 30 << "\" y=\"" << y + 4 << "\">" << escape(plot.series[i].name)
       << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace bboxlab::cli
