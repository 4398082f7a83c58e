#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lifecast/life_table.hpp"

namespace lifecast {

enum class Transform { Clr, CdfLogit };

std::string to_string(Transform transform);

/// Death-count curves mapped to an unconstrained space where linear
/// modelling is safe. Clr keeps one coordinate per age (rows sum to 0);
/// CdfLogit drops the last age (its cumulative value is identically 1),
/// leaving n_ages-1 coordinates per row.
struct UnconstrainedSeries {
  Transform transform = Transform::CdfLogit;
  double radix = 100000.0;
  std::vector<int> years;
  Eigen::MatrixXd values;  // rows: years, cols: transformed coordinates

  int n_years() const { return static_cast<int>(years.size()); }
  int n_coords() const { return static_cast<int>(values.cols()); }
};

struct CdfOptions {
  /// Clamp cumulative values into [eps, 1-eps] instead of rejecting
  /// curves whose CDF saturates before the last age. Off by default.
  bool clamp = false;
  double eps = 1e-12;
};

/// Centered log-ratio: G(u) = ln d(u) - mean_u ln d(u). Scale-free, so
/// the radix cancels. Throws ZeroOrNegativeCountError on any d <= 0.
UnconstrainedSeries clr_forward(const LifeTableSeries& series);

/// Inverse of clr_forward: shifted softmax rescaled to the radix. Any
/// real curve maps to positive counts summing to the radix.
Eigen::VectorXd clr_inverse_curve(const Eigen::VectorXd& curve, double radix);
LifeTableSeries clr_inverse(const UnconstrainedSeries& series, const AgeGrid& grid, Sex sex);

/// Logit of the within-year cumulative distribution, last age dropped.
/// Throws DegenerateCdfError when the CDF hits 0 or 1 before the last
/// age (leading or trailing zero mass), unless options.clamp is set.
UnconstrainedSeries cdf_forward(const LifeTableSeries& series, const CdfOptions& options = {});

/// Inverse of cdf_forward. The logistic values are restored, a running
/// maximum repairs any non-monotone segment (forecast curves are not
/// guaranteed monotone), the last cumulative value is pinned to 1, and
/// first differences scaled by the radix give nonnegative counts.
Eigen::VectorXd cdf_inverse_curve(const Eigen::VectorXd& curve, double radix);
LifeTableSeries cdf_inverse(const UnconstrainedSeries& series, const AgeGrid& grid, Sex sex);

/// Maps one transform-space curve back to counts under either transform.
Eigen::VectorXd inverse_transform_curve(Transform transform, const Eigen::VectorXd& curve,
                                        double radix);

/// Applies the requested forward transform.
UnconstrainedSeries forward_transform(Transform transform, const LifeTableSeries& series,
                                      const CdfOptions& options = {});

}  // namespace lifecast
