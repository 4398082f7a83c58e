#include "lifecast/score_forecast.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lifecast {

namespace {

void check_inputs(const Eigen::VectorXd& series, int max_horizon) {
  if (series.size() < 3) throw std::invalid_argument("score forecasting needs n >= 3");
  if (max_horizon < 1) throw std::invalid_argument("forecast horizon must be >= 1");
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    if (!std::isfinite(series(i))) throw std::invalid_argument("non-finite score value");
  }
}

}  // namespace

ScoreForecast forecast_rwd(const Eigen::VectorXd& series, int max_horizon) {
  check_inputs(series, max_horizon);
  const Eigen::Index n = series.size();
  Eigen::VectorXd diffs = series.tail(n - 1) - series.head(n - 1);
  const double drift = diffs.mean();
  const double sigma2 =
      (diffs.array() - drift).square().sum() / static_cast<double>(diffs.size() - 1);

  ScoreForecast fc;
  fc.method = "rwd";
  fc.order = 0;
  fc.parameters = {drift, sigma2};
  fc.point.resize(max_horizon);
  fc.variance.resize(max_horizon);
  const double inflation = 1.0 + 1.0 / static_cast<double>(n - 1);
  for (int h = 1; h <= max_horizon; ++h) {
    fc.point[h - 1] = series(n - 1) + h * drift;
    fc.variance[h - 1] = sigma2 * h * inflation;
  }
  return fc;
}

ScoreForecast forecast_ar(const Eigen::VectorXd& series, int max_horizon, int max_order) {
  check_inputs(series, max_horizon);
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  const Eigen::Index n = series.size();
  // Every candidate order is scored on the same rows, conditioning on
  // max_order initial values, so the AICs are comparable.
  int p_max = std::min<int>(max_order, static_cast<int>(n) - 3);
  p_max = std::max(p_max, 0);
  while (p_max > 0 && n - p_max < 2 * (p_max + 1)) --p_max;
  const Eigen::Index rows = n - p_max;

  int best_p = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_coef;  // [intercept, a1..ap]
  double best_sigma2 = 0.0;

  const double variance_floor = 1e-12 * (series.array() - series.mean()).square().mean();
  for (int p = 0; p <= p_max; ++p) {
    Eigen::MatrixXd design(rows, p + 1);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index t = p_max + r;
      design(r, 0) = 1.0;
      for (int i = 1; i <= p; ++i) design(r, i) = series(t - i);
      target(r) = series(t);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p + 1) continue;  // collinear design, drop this order
    Eigen::VectorXd coef = qr.solve(target);
    const double rss = (target - design * coef).squaredNorm();
    const double sigma2_ml = std::max(rss / static_cast<double>(rows), variance_floor);
    const double aic = rows * std::log(std::max(sigma2_ml, 1e-300)) + 2.0 * (p + 1);
    if (aic < best_aic) {
      best_aic = aic;
      best_p = p;
      best_coef = coef;
      const Eigen::Index dof = rows - (p + 1);
      best_sigma2 = dof > 0 ? rss / static_cast<double>(dof) : 0.0;
    }
  }

  ScoreForecast fc;
  fc.method = "ar";
  fc.order = best_p;
  fc.parameters.assign(best_coef.data(), best_coef.data() + best_coef.size());
  fc.parameters.push_back(best_sigma2);

  std::vector<double> extended(series.data(), series.data() + n);
  std::vector<double> psi = {1.0};
  double psi_sum_sq = 0.0;
  fc.point.resize(max_horizon);
  fc.variance.resize(max_horizon);
  for (int h = 1; h <= max_horizon; ++h) {
    double value = best_coef(0);
    for (int i = 1; i <= best_p; ++i) value += best_coef(i) * extended[extended.size() - i];
    extended.push_back(value);
    fc.point[h - 1] = value;

    psi_sum_sq += psi[h - 1] * psi[h - 1];
    fc.variance[h - 1] = best_sigma2 * psi_sum_sq;
    double next_psi = 0.0;
    for (int i = 1; i <= std::min(best_p, h); ++i) next_psi += best_coef(i) * psi[h - i];
    psi.push_back(next_psi);
  }
  return fc;
}

ScoreForecast forecast_scores(const Eigen::VectorXd& series, int max_horizon,
                              const ScoreModelConfig& config) {
  return config.kind == ScoreModelConfig::Kind::RandomWalkDrift
             ? forecast_rwd(series, max_horizon)
             : forecast_ar(series, max_horizon, config.ar_max_order);
}

}  // namespace lifecast
