#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace krylovlab::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> yerr;  // optional error bars, same length as y
  std::string color = "#1f77b4";
  bool markers = false;
};

struct LinePlot {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  std::optional<double> ymin, ymax;
};

// Self-contained polyline plot with axes, ticks and a legend; no external
// plotting dependency.
void write_line_plot(const std::string& path, const LinePlot& plot);

// Grayscale-to-hot heatmap of a row-major matrix, row 0 at the bottom.
void write_heatmap(const std::string& path, const Eigen::MatrixXd& values,
                   const std::string& title, const std::string& xlabel,
                   const std::string& ylabel);

}  // namespace krylovlab::svg
