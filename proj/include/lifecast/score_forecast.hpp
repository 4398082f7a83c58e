#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lifecast {

/// Point forecasts and forecast variances for one score series at
/// horizons 1..H, plus the fitted model's description.
struct ScoreForecast {
  std::vector<double> point;     // index h-1
  std::vector<double> variance;  // index h-1, nondecreasing in h
  std::string method;            // "rwd" or "ar"
  int order = 0;                 // autoregressive order (0 for rwd)
  std::vector<double> parameters;

  int max_horizon() const { return static_cast<int>(point.size()); }
};

/// Random walk with drift. point(h) = last + h * mean(diff);
/// variance(h) = var(diff) * h * (1 + 1/(n-1)), where var uses the
/// sample divisor. Needs n >= 3 and max_horizon >= 1.
ScoreForecast forecast_rwd(const Eigen::VectorXd& series, int max_horizon);

/// AR(p) with intercept, p chosen in 0..max_order by AIC over a common
/// estimation sample (conditioning on max_order initial values). A
/// rank-deficient design for some p removes that candidate; p = 0 (mean
/// plus noise) is always available, so degenerate series fall back to it.
/// Forecast variance accumulates squared moving-average weights.
ScoreForecast forecast_ar(const Eigen::VectorXd& series, int max_horizon, int max_order = 6);

struct ScoreModelConfig {
  enum class Kind { RandomWalkDrift, Ar } kind = Kind::RandomWalkDrift;
  int ar_max_order = 6;
};

ScoreForecast forecast_scores(const Eigen::VectorXd& series, int max_horizon,
                              const ScoreModelConfig& config);

}  // namespace lifecast
