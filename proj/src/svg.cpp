#include "angular/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace angular::svg {

namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double transform(double v) const { return log ? std::log10(v) : v; }

  // Fraction of the way along the axis.
  double fraction(double v) const {
    const double a = transform(lo);
    const double b = transform(hi);
    return b == a ? 0.5 : (transform(v) - a) / (b - a);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int first = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
      const int last = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
      const int stride = std::max(1, (last - first) / 6 + 1);
      for (int e = first; e <= last; e += stride) out.push_back(std::pow(10.0, e));
      if (out.empty()) out = {lo, hi};
      return out;
    }
    for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
    return out;
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis fit_axis(const std::vector<const std::vector<double>*>& columns, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* col : columns) {
    for (double v : *col) {
      if (!usable(v, log)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) {
    lo = log ? 0.1 : 0.0;
    hi = 1.0;
  }
  if (lo == hi) {
    if (log) {
      lo /= 2.0;
      hi *= 2.0;
    } else {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  return {lo, hi, log};
}

struct Frame {
  double width;
  double height;
  Axis x;
  Axis y;

  double plot_w() const { return width - kLeft - kRight; }
  double plot_h() const { return height - kTop - kBottom; }
  double px(double v) const { return kLeft + x.fraction(v) * plot_w(); }
  double py(double v) const { return kTop + (1.0 - y.fraction(v)) * plot_h(); }
};

std::string header(const PlotOptions& o) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) +
       "\" height=\"" + std::to_string(o.height) + "\" viewBox=\"0 0 " +
       std::to_string(o.width) + ' ' + std::to_string(o.height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(o.width) + "\" height=\"" +
       std::to_string(o.height) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(o.width / 2.0) +
       "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       escape(o.title) + "</text>\n";
  return s;
}

std::string axes(const Frame& f, const PlotOptions& o) {
  std::string s;
  const double x0 = kLeft;
  const double x1 = kLeft + f.plot_w();
  const double y0 = kTop + f.plot_h();
  const double y1 = kTop;
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" +
       num(y0) + "\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
       num(y1) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t : f.x.ticks()) {
    const double p = f.px(t);
    s += "<line x1=\"" + num(p) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(p) + "\" y2=\"" +
         num(y0 + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(p) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"middle\">" +
         tick_label(t) + "</text>\n";
  }
  for (double t : f.y.ticks()) {
    const double p = f.py(t);
    s += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(p) + "\" x2=\"" + num(x0) + "\" y2=\"" +
         num(p) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(p + 4) + "\" text-anchor=\"end\">" +
         tick_label(t) + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + f.plot_w() / 2) + "\" y=\"" + num(f.height - 12) +
       "\" text-anchor=\"middle\">" + escape(o.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num(kTop + f.plot_h() / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(kTop + f.plot_h() / 2) +
       ")\">" + escape(o.y_label) + "</text>\n";
  s += "</g>\n";
  return s;
}

std::string polyline(const Frame& f, const Series& series, const char* color) {
  std::string points;
  for (std::size_t i = 0; i < std::min(series.xs.size(), series.ys.size()); ++i) {
    if (!usable(series.xs[i], f.x.log) || !usable(series.ys[i], f.y.log)) continue;
    if (!points.empty()) points += ' ';
    points += num(f.px(series.xs[i])) + ',' + num(f.py(series.ys[i]));
  }
  return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"1.5\" points=\"" + points + "\"><title>" + escape(series.name) +
         "</title></polyline>\n";
}

std::string legend(const Frame& f, const std::vector<Series>& series) {
  std::string s = "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const double x = f.width - kRight + 12;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 5) + "\" width=\"16\" height=\"3\" fill=\"" +
         kPalette[i % kPalette.size()] + "\"/>\n";
    s += "<text x=\"" + num(x + 22) + "\" y=\"" + num(y) + "\">" + escape(series[i].name) +
         "</text>\n";
  }
  s += "</g>\n";
  return s;
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string line_plot(const std::vector<Series>& series, const PlotOptions& options) {
  std::vector<const std::vector<double>*> xcols;
  std::vector<const std::vector<double>*> ycols;
  for (const auto& s : series) {
    xcols.push_back(&s.xs);
    ycols.push_back(&s.ys);
  }
  const Frame frame{static_cast<double>(options.width), static_cast<double>(options.height),
                    fit_axis(xcols, options.log_x), fit_axis(ycols, options.log_y)};
  std::string out = header(options);
  out += axes(frame, options);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += polyline(frame, series[i], kPalette[i % kPalette.size()]);
  }
  out += legend(frame, series);
  out += "</svg>\n";
  return out;
}

std::string contour_overlay(const Grid& grid, const std::vector<Series>& paths,
                            const PlotOptions& options,
                            std::optional<std::pair<double, double>> marker) {
  const Axis xa{grid.xs.front(), grid.xs.back(), false};
  const Axis ya{grid.ys.front(), grid.ys.back(), false};
  const Frame frame{static_cast<double>(options.width), static_cast<double>(options.height), xa,
                    ya};
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  for (double v : grid.values) {
    if (!std::isfinite(v)) continue;
    fmin = std::min(fmin, v);
    fmax = std::max(fmax, v);
  }
  const double span = std::log1p(std::max(fmax - fmin, 0.0));
  std::string out = header(options);
  out += "<g shape-rendering=\"crispEdges\">\n";
  const double cw = frame.plot_w() / static_cast<double>(grid.xs.size());
  const double ch = frame.plot_h() / static_cast<double>(grid.ys.size());
  for (std::size_t iy = 0; iy < grid.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      const double v = grid.at(ix, iy);
      const double level = span > 0.0 && std::isfinite(v) ? std::log1p(v - fmin) / span : 1.0;
      const int shade = static_cast<int>(std::lround(235.0 - 175.0 * level));
      const int blue = static_cast<int>(std::lround(255.0 - 60.0 * level));
      const double x = kLeft + cw * static_cast<double>(ix);
      const double y = kTop + frame.plot_h() - ch * static_cast<double>(iy + 1);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cw + 0.05) +
             "\" height=\"" + num(ch + 0.05) + "\" fill=\"rgb(" + std::to_string(shade) + ',' +
             std::to_string(shade) + ',' + std::to_string(blue) + ")\"/>\n";
    }
  }
  out += "</g>\n";
  out += axes(frame, options);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out += polyline(frame, paths[i], kPalette[i % kPalette.size()]);
  }
  if (marker) {
    const double mx = frame.px(marker->first);
    const double my = frame.py(marker->second);
    out += "<g stroke=\"black\" stroke-width=\"2\"><line x1=\"" + num(mx - 6) + "\" y1=\"" +
           num(my - 6) + "\" x2=\"" + num(mx + 6) + "\" y2=\"" + num(my + 6) + "\"/><line x1=\"" +
           num(mx - 6) + "\" y1=\"" + num(my + 6) + "\" x2=\"" + num(mx + 6) + "\" y2=\"" +
           num(my - 6) + "\"/></g>\n";
  }
  out += legend(frame, paths);
  out += "</svg>\n";
  return out;
}

}  // namespace angular::svg
