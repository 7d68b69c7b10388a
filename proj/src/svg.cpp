#include "krylovlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "krylovlab/errors.hpp"

namespace krylovlab::svg {

namespace {

constexpr double kW = 760, kH = 520;
constexpr double kL = 80, kR = 30, kT = 50, kB = 60;  // margins

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step)
    ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return ticks;
}

}  // namespace

void write_line_plot(const std::string& path, const LinePlot& plot) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      const double e = i < s.yerr.size() ? s.yerr[i] : 0.0;
      ylo = std::min(ylo, s.y[i] - e);
      yhi = std::max(yhi, s.y[i] + e);
    }
  if (!(xhi > xlo)) xhi = xlo + 1;
  if (plot.ymin) ylo = *plot.ymin;
  if (plot.ymax) yhi = *plot.ymax;
  if (!(yhi > ylo)) yhi = ylo + 1;
  const double ypad = 0.05 * (yhi - ylo);
  if (!plot.ymin) ylo -= ypad;
  if (!plot.ymax) yhi += ypad;

  auto px = [&](double x) { return kL + (x - xlo) / (xhi - xlo) * (kW - kL - kR); };
  auto py = [&](double y) { return kH - kB - (y - ylo) / (yhi - ylo) * (kH - kT - kB); };

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "' viewBox='0 0 " << kW << " " << kH << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kW / 2 << "' y='28' text-anchor='middle' font-size='17' "
         "font-family='sans-serif'>"
      << plot.title << "</text>\n";

  for (double t : nice_ticks(xlo, xhi)) {
    const double x = px(t);
    out << "<line x1='" << x << "' y1='" << kH - kB << "' x2='" << x << "' y2='" << kT
        << "' stroke='#dddddd'/>\n";
    out << "<text x='" << x << "' y='" << kH - kB + 20
        << "' text-anchor='middle' font-size='12' font-family='sans-serif'>" << fmt(t)
        << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi)) {
    const double y = py(t);
    out << "<line x1='" << kL << "' y1='" << y << "' x2='" << kW - kR << "' y2='" << y
        << "' stroke='#dddddd'/>\n";
    out << "<text x='" << kL - 8 << "' y='" << y + 4
        << "' text-anchor='end' font-size='12' font-family='sans-serif'>" << fmt(t)
        << "</text>\n";
  }
  out << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR << "' height='"
      << kH - kT - kB << "' fill='none' stroke='black'/>\n";
  out << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kH - 16
      << "' text-anchor='middle' font-size='14' font-family='sans-serif'>" << plot.xlabel
      << "</text>\n";
  out << "<text x='22' y='" << (kT + kH - kB) / 2
      << "' text-anchor='middle' font-size='14' font-family='sans-serif' transform='rotate(-90 22 "
      << (kT + kH - kB) / 2 << ")'>" << plot.ylabel << "</text>\n";

  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.yerr.size() && i < s.y.size(); ++i) {
      if (s.yerr[i] <= 0) continue;
      const double x = px(s.x[i]);
      out << "<line x1='" << x << "' y1='" << py(s.y[i] - s.yerr[i]) << "' x2='" << x << "' y2='"
          << py(s.y[i] + s.yerr[i]) << "' stroke='" << s.color << "' stroke-opacity='0.45'/>\n";
    }
    out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.6' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "'/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i]) << "' r='2.2' fill='"
            << s.color << "'/>\n";
  }

  double ly = kT + 14;
  for (const auto& s : plot.series) {
    if (s.label.empty()) continue;
    out << "<line x1='" << kW - kR - 150 << "' y1='" << ly << "' x2='" << kW - kR - 120
        << "' y2='" << ly << "' stroke='" << s.color << "' stroke-width='2'/>\n";
    out << "<text x='" << kW - kR - 114 << "' y='" << ly + 4
        << "' font-size='12' font-family='sans-serif'>" << s.label << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot open '" + path + "' for writing", 0);
  f << out.str();
}

void write_heatmap(const std::string& path, const Eigen::MatrixXd& values,
                   const std::string& title, const std::string& xlabel,
                   const std::string& ylabel) {
  const Eigen::Index rows = values.rows(), cols = values.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("write_heatmap: empty matrix");
  const double vmax = std::max(values.maxCoeff(), 1e-300);

  const double cw = (kW - kL - kR) / static_cast<double>(cols);
  const double ch = (kH - kT - kB) / static_cast<double>(rows);

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "' viewBox='0 0 " << kW << " " << kH << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kW / 2 << "' y='28' text-anchor='middle' font-size='17' "
         "font-family='sans-serif'>"
      << title << "</text>\n";
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = std::clamp(values(r, c) / vmax, 0.0, 1.0);
      // black-red-yellow ramp
      const int red = static_cast<int>(255 * std::min(1.0, 2 * v));
      const int green = static_cast<int>(255 * std::max(0.0, 2 * v - 1));
      out << "<rect x='" << kL + c * cw << "' y='" << kH - kB - (r + 1) * ch << "' width='"
          << cw + 0.5 << "' height='" << ch + 0.5 << "' fill='rgb(" << red << ',' << green
          << ",0)'/>\n";
    }
  out << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR << "' height='"
      << kH - kT - kB << "' fill='none' stroke='black'/>\n";
  out << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kH - 16
      << "' text-anchor='middle' font-size='14' font-family='sans-serif'>" << xlabel
      << "</text>\n";
  out << "<text x='22' y='" << (kT + kH - kB) / 2
      << "' text-anchor='middle' font-size='14' font-family='sans-serif' transform='rotate(-90 22 "
      << (kT + kH - kB) / 2 << ")'>" << ylabel << "</text>\n";
  out << "</svg>\n";

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot open '" + path + "' for writing", 0);
  f << out.str();
}

}  // namespace krylovlab::svg
