#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lifecast/transforms.hpp"

namespace lifecast {

/// Coordinate-wise sample standard deviation (divisor M-1) of M residual
/// curves stacked as rows. Needs M >= 2.
Eigen::VectorXd functional_sd(const Eigen::MatrixXd& residuals);

/// Standard normal quantile.
double normal_quantile(double p);

struct XiResult {
  double xi = 0.0;
  int n_ratios = 0;
  /// True when the tuned value is the largest pooled ratio, i.e. the
  /// sample is too small for the requested level.
  bool under_supported = false;
};

/// sd-based tuning parameter: the ceil((1-alpha) N)-th smallest of the
/// pooled ratios |residual(m,u)| / gamma(u) over all rows m and ages u.
/// Ages with gamma(u) = 0 and all-zero residuals carry no information
/// and are skipped; gamma(u) = 0 against a nonzero residual throws
/// DegenerateGammaError. No ratios at all yields xi = 0.
XiResult calibrate_xi(const Eigen::MatrixXd& residuals, const Eigen::VectorXd& gamma,
                      double alpha);

struct IntervalBand {
  Eigen::VectorXd lower;  // >= 0, pointwise <= upper
  Eigen::VectorXd upper;
  double alpha = 0.2;
};

/// [point - xi gamma, point + xi gamma] on the count scale, lower edge
/// clamped at zero.
IntervalBand sd_band(const Eigen::VectorXd& point, const Eigen::VectorXd& gamma,
                     double xi, double alpha);

struct ConformalQuantiles {
  Eigen::VectorXd q;
  bool under_supported = false;  // rank k exceeded M and was capped
};

/// Per-age split-conformal quantile: the min(M, ceil((1-alpha)(M+1)))-th
/// smallest of the M absolute residuals at that age. Needs M >= 1.
ConformalQuantiles conformal_quantiles(const Eigen::MatrixXd& residuals, double alpha);

/// [point - q, point + q] on the count scale, lower edge clamped at zero.
IntervalBand conformal_band(const Eigen::VectorXd& point, const ConformalQuantiles& quantiles,
                            double alpha);

/// Gaussian band built in transform space from a pointwise variance
/// curve, then mapped through the inverse transform. The inverse maps do
/// not preserve pointwise ordering, so the two mapped curves are sorted
/// pointwise before being returned as lower/upper.
IntervalBand parametric_band(const Eigen::VectorXd& point_trans,
                             const Eigen::VectorXd& variance_trans, double alpha,
                             Transform transform, double radix);

}  // namespace lifecast
