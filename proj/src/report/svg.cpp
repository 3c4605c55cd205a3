#include "cutoff/report/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cutoff/error.hpp"

namespace cutoff::report {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
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
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

/// About five ticks at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(Range& r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  r.lo = std::floor(r.lo / step) * step;
  r.hi = std::ceil(r.hi / step) * step;
  std::vector<double> out;
  for (double v = r.lo; v <= r.hi + step * 1e-9; v += step) out.push_back(v);
  return out;
}

}  // namespace

std::string render_svg(const Plot& plot) {
  const double left = 70, right = 170, top = 40, bottom = 55;
  const double w = plot.width, h = plot.height;
  const double pw = w - left - right, ph = h - top - bottom;

  Range xr, yr;
  for (const Series& s : plot.series)
    for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i)
      if (std::isfinite(s.xs[i]) && std::isfinite(s.ys[i])) {
        xr.add(s.xs[i]);
        yr.add(s.ys[i]);
      }
  for (const Marker& m : plot.vertical_markers) xr.add(m.x);
  xr.settle();
  yr.settle();
  const std::vector<double> xt = ticks(xr), yt = ticks(yr);
  auto X = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto Y = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(plot.title)
    << "</text>\n";

  for (double v : xt) {
    s << "<line x1=\"" << num(X(v)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(X(v)) << "\" y2=\"" << num(top + ph)
      << "\" stroke=\"#e5e5e5\"/>\n";
    s << "<text x=\"" << num(X(v)) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">" << tick_label(v)
      << "</text>\n";
  }
  for (double v : yt) {
    s << "<line x1=\"" << num(left) << "\" y1=\"" << num(Y(v)) << "\" x2=\"" << num(left + pw) << "\" y2=\"" << num(Y(v))
      << "\" stroke=\"#e5e5e5\"/>\n";
    s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(Y(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
      << "</text>\n";
  }
  s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(h - 14) << "\" text-anchor=\"middle\">"
    << escape(plot.x_label) << "</text>\n";
  s << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.y_label) << "</text>\n";

  for (const Marker& m : plot.vertical_markers) {
    if (!std::isfinite(m.x)) continue;
    s << "<line x1=\"" << num(X(m.x)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(X(m.x)) << "\" y2=\""
      << num(top + ph) << "\" stroke=\"#555\" stroke-dasharray=\"4,3\"/>\n";
    s << "<text x=\"" << num(X(m.x) + 3) << "\" y=\"" << num(top + 12) << "\" font-size=\"10\" fill=\"#555\">"
      << escape(m.label) << "</text>\n";
  }

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const Series& series = plot.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream points;
    for (std::size_t i = 0; i < series.xs.size() && i < series.ys.size(); ++i) {
      if (!std::isfinite(series.xs[i]) || !std::isfinite(series.ys[i])) continue;
      points << num(X(series.xs[i])) << ',' << num(Y(series.ys[i])) << ' ';
      if (series.markers)
        s << "<circle cx=\"" << num(X(series.xs[i])) << "\" cy=\"" << num(Y(series.ys[i])) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    if (series.line)
      s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"" << points.str()
        << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(k);
    s << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 32)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << num(left + pw + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(series.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_svg(const std::string& path, const Plot& plot) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << render_svg(plot);
}

}  // namespace cutoff::report
