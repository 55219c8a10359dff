#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "angular/harness.hpp"

namespace angular::svg {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 760;
  int height = 480;
};

/// One <polyline> per series plus axes, ticks and a legend. Non-finite
/// points, and non-positive points on a log axis, are skipped.
std::string line_plot(const std::vector<Series>& series, const PlotOptions& options);

/// Heat-map of log(1 + f - min f) over the grid with one <polyline> per
/// path and an optional cross marking a point (e.g. the minimum).
std::string contour_overlay(const Grid& grid, const std::vector<Series>& paths,
                            const PlotOptions& options,
                            std::optional<std::pair<double, double>> marker = std::nullopt);

std::string escape(const std::string& text);

}  // namespace angular::svg
