#include "lifecast/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lifecast {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 50.0;
constexpr double kMarginRight = 15.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 30.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Scale {
  double x0, x1, y0, y1;

  double x(double v) const {
    return kMarginLeft + (v - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
  }
  double y(double v) const {
    return kHeight - kMarginBottom -
           (v - y0) / (y1 - y0) * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string polyline_points(const Eigen::VectorXd& values, const Scale& scale) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i > 0) out << ' ';
    out << fmt(scale.x(static_cast<double>(i))) << ',' << fmt(scale.y(values(i)));
  }
  return out.str();
}

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth)
      << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << ' '
      << fmt(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kWidth / 2)
      << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << title << "</text>\n";
}

void axes(std::ostringstream& out, const Scale& scale) {
  out << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
      << "\" x2=\"" << fmt(kWidth - kMarginRight) << "\" y2=\""
      << fmt(kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kMarginTop) << "\" x2=\""
      << fmt(kMarginLeft) << "\" y2=\"" << fmt(kHeight - kMarginBottom)
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(kMarginTop + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(scale.y1)
      << "</text>\n";
  out << "<text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(kHeight - kMarginBottom)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(scale.y0)
      << "</text>\n";
}

}  // namespace

std::string svg_curve_fan(const LifeTableSeries& series, const std::string& title) {
  const Eigen::MatrixXd& values = series.values();
  Scale scale{0.0, static_cast<double>(series.n_ages() - 1), 0.0,
              std::max(values.maxCoeff(), 1.0)};
  std::ostringstream out;
  open_svg(out, title);
  axes(out, scale);
  const int n = series.n_years();
  for (int t = 0; t < n; ++t) {
    const int hue = n > 1 ? 280 * t / (n - 1) : 0;  // red through violet
    out << "<polyline fill=\"none\" stroke=\"hsl(" << hue
        << ",85%,45%)\" stroke-width=\"1\" points=\""
        << polyline_points(values.row(t).transpose(), scale) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_band_plot(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          const Eigen::VectorXd& point, const Eigen::VectorXd& actual,
                          const std::string& title) {
  if (lower.size() != upper.size() || lower.size() != point.size() ||
      lower.size() != actual.size() || lower.size() < 2) {
    throw std::invalid_argument("band plot needs four equal-length curves");
  }
  Scale scale{0.0, static_cast<double>(lower.size() - 1), 0.0,
              std::max({upper.maxCoeff(), actual.maxCoeff(), 1.0})};
  std::ostringstream out;
  open_svg(out, title);
  axes(out, scale);
  // shaded band: upper path forward, lower path backward
  out << "<polygon fill=\"hsl(210,70%,85%)\" stroke=\"none\" points=\""
      << polyline_points(upper, scale) << ' ';
  for (Eigen::Index i = lower.size() - 1; i >= 0; --i) {
    out << fmt(scale.x(static_cast<double>(i))) << ',' << fmt(scale.y(lower(i)));
    if (i > 0) out << ' ';
  }
  out << "\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"hsl(210,80%,40%)\" stroke-width=\"1.5\" points=\""
      << polyline_points(point, scale) << "\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"4 2\" points=\""
      << polyline_points(actual, scale) << "\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace lifecast
