#pragma once

#include <Eigen/Dense>
#include <string>

#include "lifecast/life_table.hpp"

namespace lifecast {

/// Static SVG of every year's curve, colored along a rainbow from the
/// first year (red) to the last (violet).
std::string svg_curve_fan(const LifeTableSeries& series, const std::string& title);

/// Static SVG of one interval band (shaded), its point forecast and the
/// realized curve, over the age index.
std::string svg_band_plot(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          const Eigen::VectorXd& point, const Eigen::VectorXd& actual,
                          const std::string& title);

}  // namespace lifecast
