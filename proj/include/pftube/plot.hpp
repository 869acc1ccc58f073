#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pftube::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Minimal static SVG line/scatter chart. Non-positive values are dropped on log axes.
std::string render_svg(const Axes& axes, const std::vector<Series>& series);
void write_svg(const std::filesystem::path& path, const Axes& axes, const std::vector<Series>& series);

}  // namespace pftube::plot
