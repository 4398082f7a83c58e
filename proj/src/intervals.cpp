#include "lifecast/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "lifecast/errors.hpp"

namespace lifecast {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie strictly inside (0,1)");
  }
}

// ceil with a small backoff so a product like 0.8 * 20 that lands an
// epsilon above an integer does not round the rank up a slot.
int order_rank(double x) {
  return static_cast<int>(std::ceil(x - 1e-9));
}

double kth_smallest(std::vector<double>& values, int k) {
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
  return values[k - 1];
}

}  // namespace

Eigen::VectorXd functional_sd(const Eigen::MatrixXd& residuals) {
  const Eigen::Index m = residuals.rows();
  if (m < 2) throw std::invalid_argument("functional sd needs at least 2 residual rows");
  Eigen::VectorXd mean = residuals.colwise().mean().transpose();
  Eigen::MatrixXd centered = residuals.rowwise() - mean.transpose();
  Eigen::VectorXd var =
      (centered.array().square().colwise().sum() / static_cast<double>(m - 1)).transpose();
  return var.cwiseSqrt();
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level outside (0,1)");
  static const boost::math::normal_distribution<double> standard(0.0, 1.0);
  return boost::math::quantile(standard, p);
}

XiResult calibrate_xi(const Eigen::MatrixXd& residuals, const Eigen::VectorXd& gamma,
                      double alpha) {
  check_alpha(alpha);
  if (residuals.cols() != gamma.size()) {
    throw std::invalid_argument("residual columns must match gamma length");
  }
  std::vector<double> ratios;
  ratios.reserve(residuals.size());
  for (Eigen::Index u = 0; u < residuals.cols(); ++u) {
    if (gamma(u) < 0.0) throw std::invalid_argument("gamma must be nonnegative");
    if (gamma(u) == 0.0) {
      for (Eigen::Index m = 0; m < residuals.rows(); ++m) {
        if (residuals(m, u) != 0.0) {
          throw DegenerateGammaError(
              static_cast<int>(u), "zero spread against nonzero residual at age index " +
                                       std::to_string(u));
        }
      }
      continue;  // no information at this age
    }
    for (Eigen::Index m = 0; m < residuals.rows(); ++m) {
      ratios.push_back(std::abs(residuals(m, u)) / gamma(u));
    }
  }

  XiResult result;
  result.n_ratios = static_cast<int>(ratios.size());
  if (ratios.empty()) return result;  // all residuals zero: xi = 0
  int k = order_rank((1.0 - alpha) * result.n_ratios);
  k = std::clamp(k, 1, result.n_ratios);
  result.xi = kth_smallest(ratios, k);
  result.under_supported = (k == result.n_ratios);
  return result;
}

IntervalBand sd_band(const Eigen::VectorXd& point, const Eigen::VectorXd& gamma,
                     double xi, double alpha) {
  check_alpha(alpha);
  if (point.size() != gamma.size()) {
    throw std::invalid_argument("point and gamma lengths differ");
  }
  if (xi < 0.0) throw std::invalid_argument("xi must be nonnegative");
  IntervalBand band;
  band.alpha = alpha;
  band.lower = (point - xi * gamma).cwiseMax(0.0);
  band.upper = point + xi * gamma;
  return band;
}

ConformalQuantiles conformal_quantiles(const Eigen::MatrixXd& residuals, double alpha) {
  check_alpha(alpha);
  const int m = static_cast<int>(residuals.rows());
  if (m < 1) throw std::invalid_argument("conformal calibration needs at least 1 residual row");
  const int rank_raw = order_rank((1.0 - alpha) * (m + 1));
  const int k = std::clamp(rank_raw, 1, m);

  ConformalQuantiles result;
  result.under_supported = rank_raw > m;
  result.q.resize(residuals.cols());
  std::vector<double> abs_column(m);
  for (Eigen::Index u = 0; u < residuals.cols(); ++u) {
    for (int i = 0; i < m; ++i) abs_column[i] = std::abs(residuals(i, u));
    result.q(u) = kth_smallest(abs_column, k);
  }
  return result;
}

IntervalBand conformal_band(const Eigen::VectorXd& point, const ConformalQuantiles& quantiles,
                            double alpha) {
  check_alpha(alpha);
  if (point.size() != quantiles.q.size()) {
    throw std::invalid_argument("point and quantile lengths differ");
  }
  IntervalBand band;
  band.alpha = alpha;
  band.lower = (point - quantiles.q).cwiseMax(0.0);
  band.upper = point + quantiles.q;
  return band;
}

IntervalBand parametric_band(const Eigen::VectorXd& point_trans,
                             const Eigen::VectorXd& variance_trans, double alpha,
                             Transform transform, double radix) {
  check_alpha(alpha);
  if (point_trans.size() != variance_trans.size()) {
    throw std::invalid_argument("point and variance lengths differ");
  }
  if ((variance_trans.array() < 0.0).any()) {
    throw std::invalid_argument("variance must be nonnegative");
  }
  const double z = normal_quantile(1.0 - alpha / 2.0);
  Eigen::VectorXd half = z * variance_trans.cwiseSqrt();
  Eigen::VectorXd a = inverse_transform_curve(transform, point_trans - half, radix);
  Eigen::VectorXd b = inverse_transform_curve(transform, point_trans + half, radix);
  IntervalBand band;
  band.alpha = alpha;
  band.lower = a.cwiseMin(b).cwiseMax(0.0);
  band.upper = a.cwiseMax(b);
  return band;
}

}  // namespace lifecast
