#include "lifecast/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "lifecast/errors.hpp"

namespace lifecast {

std::string to_string(Transform transform) {
  return transform == Transform::Clr ? "clr" : "cdf";
}

UnconstrainedSeries clr_forward(const LifeTableSeries& series) {
  const Eigen::MatrixXd& d = series.values();
  Eigen::MatrixXd G(d.rows(), d.cols());
  for (Eigen::Index t = 0; t < d.rows(); ++t) {
    for (Eigen::Index a = 0; a < d.cols(); ++a) {
      if (!(d(t, a) > 0.0)) {
        throw ZeroOrNegativeCountError(
            series.years()[t], static_cast<int>(a),
            "log-ratio transform needs positive counts; year " +
                std::to_string(series.years()[t]) + " age " +
                series.grid().labels()[a] + " is " + std::to_string(d(t, a)));
      }
      G(t, a) = std::log(d(t, a));
    }
    G.row(t).array() -= G.row(t).mean();
  }
  return UnconstrainedSeries{Transform::Clr, series.radix(), series.years(), std::move(G)};
}

Eigen::VectorXd clr_inverse_curve(const Eigen::VectorXd& curve, double radix) {
  // Shift by the max before exponentiating so large coordinates cannot overflow.
  Eigen::VectorXd e = (curve.array() - curve.maxCoeff()).exp();
  return e * (radix / e.sum());
}

LifeTableSeries clr_inverse(const UnconstrainedSeries& series, const AgeGrid& grid, Sex sex) {
  Eigen::MatrixXd d(series.values.rows(), series.values.cols());
  for (Eigen::Index t = 0; t < d.rows(); ++t) {
    d.row(t) = clr_inverse_curve(series.values.row(t), series.radix);
  }
  return LifeTableSeries(grid, series.years, sex, std::move(d), series.radix);
}

UnconstrainedSeries cdf_forward(const LifeTableSeries& series, const CdfOptions& options) {
  const Eigen::MatrixXd& d = series.values();
  const Eigen::Index A = d.cols();
  Eigen::MatrixXd L(d.rows(), A - 1);
  for (Eigen::Index t = 0; t < d.rows(); ++t) {
    double total = d.row(t).sum();
    double cum = 0.0;
    for (Eigen::Index a = 0; a + 1 < A; ++a) {
      cum += d(t, a);
      double D = cum / total;
      if (options.clamp) {
        D = std::min(std::max(D, options.eps), 1.0 - options.eps);
      } else if (D <= 0.0 || D >= 1.0) {
        throw DegenerateCdfError(
            series.years()[t], static_cast<int>(a),
            "cumulative distribution saturates before the last age; year " +
                std::to_string(series.years()[t]) + " age " + series.grid().labels()[a]);
      }
      L(t, a) = std::log(D / (1.0 - D));
    }
  }
  return UnconstrainedSeries{Transform::CdfLogit, series.radix(), series.years(), std::move(L)};
}

Eigen::VectorXd cdf_inverse_curve(const Eigen::VectorXd& curve, double radix) {
  const Eigen::Index A = curve.size() + 1;
  Eigen::VectorXd D(A);
  for (Eigen::Index a = 0; a + 1 < A; ++a) {
    double x = curve(a);
    D(a) = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  D(A - 1) = 1.0;
  for (Eigen::Index a = 1; a < A; ++a) D(a) = std::max(D(a), D(a - 1));
  D /= D(A - 1);  // running max ends at 1 already; kept as an explicit pin
  Eigen::VectorXd d(A);
  d(0) = D(0);
  for (Eigen::Index a = 1; a < A; ++a) d(a) = D(a) - D(a - 1);
  return d * radix;
}

LifeTableSeries cdf_inverse(const UnconstrainedSeries& series, const AgeGrid& grid, Sex sex) {
  Eigen::MatrixXd d(series.values.rows(), series.values.cols() + 1);
  for (Eigen::Index t = 0; t < d.rows(); ++t) {
    d.row(t) = cdf_inverse_curve(series.values.row(t), series.radix);
  }
  return LifeTableSeries(grid, series.years, sex, std::move(d), series.radix);
}

Eigen::VectorXd inverse_transform_curve(Transform transform, const Eigen::VectorXd& curve,
                                        double radix) {
  return transform == Transform::Clr ? clr_inverse_curve(curve, radix)
                                     : cdf_inverse_curve(curve, radix);
}

UnconstrainedSeries forward_transform(Transform transform, const LifeTableSeries& series,
                                      const CdfOptions& options) {
  return transform == Transform::Clr ? clr_forward(series) : cdf_forward(series, options);
}

}  // namespace lifecast
