#pragma once

#include <string>
#include <vector>

namespace cutoff::report {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
  bool markers = false;   // draw points as well as the line
  bool line = true;
};

struct Marker {
  double x;
  std::string label;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> vertical_markers;
  double width = 720;
  double height = 440;
};

/// Axes, ticks, polylines, markers and a legend. Non-finite points are skipped.
std::string render_svg(const Plot& plot);
void write_svg(const std::string& path, const Plot& plot);

}  // namespace cutoff::report
