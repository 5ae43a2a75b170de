#include "nsgap/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nsgap {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_svg(const LinePlot& plot) {
  const double left = 70, right = 150, top = 36, bottom = 48;
  const double w = plot.width - left - right;
  const double h = plot.height - top - bottom;

  Range xr, yr;
  for (const auto& s : plot.series) {
    for (const double x : s.x) xr.add(x);
    for (const double y : s.y) yr.add(y);
  }
  for (const auto& sp : plot.spans) {
    xr.add(sp.x0);
    xr.add(sp.x1);
  }
  if (plot.band) {
    yr.add(plot.band->first);
    yr.add(plot.band->second);
  }
  xr.settle();
  yr.settle();
  const double ypad = 0.04 * (yr.hi - yr.lo);
  yr.lo -= ypad;
  yr.hi += ypad;
  const auto X = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * w; };
  const auto Y = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * h; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
    << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(left + w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"15\">" << escape(plot.title) << "</text>\n";

  if (plot.band) {
    const double y0 = Y(plot.band->second);
    const double y1 = Y(plot.band->first);
    o << "<rect x=\"" << px(left) << "\" y=\"" << px(y0) << "\" width=\"" << px(w) << "\" height=\""
      << px(y1 - y0) << "\" fill=\"#fde9b5\" opacity=\"0.7\"/>\n";
  }
  for (const auto& sp : plot.spans) {
    o << "<rect x=\"" << px(X(sp.x0)) << "\" y=\"" << px(top) << "\" width=\""
      << px(std::max(0.5, X(sp.x1) - X(sp.x0))) << "\" height=\"" << px(h)
      << "\" fill=\"#9ecae1\" opacity=\"0.5\"><title>" << escape(sp.label) << "</title></rect>\n";
  }

  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 5.0;
    o << "<line x1=\"" << px(X(xv)) << "\" y1=\"" << px(top) << "\" x2=\"" << px(X(xv)) << "\" y2=\""
      << px(top + h) << "\" stroke=\"#eee\"/>\n";
    o << "<line x1=\"" << px(left) << "\" y1=\"" << px(Y(yv)) << "\" x2=\"" << px(left + w) << "\" y2=\""
      << px(Y(yv)) << "\" stroke=\"#eee\"/>\n";
    o << "<text x=\"" << px(X(xv)) << "\" y=\"" << px(top + h + 16) << "\" text-anchor=\"middle\">"
      << num(xv) << "</text>\n";
    o << "<text x=\"" << px(left - 6) << "\" y=\"" << px(Y(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << px(left + w / 2) << "\" y=\"" << px(plot.height - 10.0)
    << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << px(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << px(top + h / 2) << ")\">" << escape(plot.y_label) << "</text>\n";
  o << "</g>\n";
  o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(w) << "\" height=\"" << px(h)
    << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.markers) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.y[i])) continue;
        o << "<circle cx=\"" << px(X(s.x[i])) << "\" cy=\"" << px(Y(s.y[i])) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
      }
    } else if (n > 0) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.y[i])) continue;
        o << px(X(s.x[i])) << ',' << px(Y(s.y[i])) << ' ';
      }
      o << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << px(left + w + 12) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(left + w + 32)
      << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << px(left + w + 38) << "\" y=\"" << px(ly)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const LinePlot& plot, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << render_svg(plot);
}

}  // namespace nsgap
