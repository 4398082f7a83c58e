#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lifecast/fpca.hpp"
#include "lifecast/intervals.hpp"
#include "lifecast/life_table.hpp"
#include "lifecast/score_forecast.hpp"
#include "lifecast/transforms.hpp"

namespace lifecast {

enum class Approach { Sd, Conformal, Parametric };

std::string to_string(Approach approach);

/// Year boundaries of the expanding-window experiment, all inclusive.
/// Training covers the data's first year through train_end, validation
/// (train_end, val_end], test (val_end, test_end].
struct SplitSpec {
  int train_end = 0;
  int val_end = 0;
  int test_end = 0;

  /// Thirds of the year span; a remainder goes to the training segment.
  static SplitSpec equal_thirds(const std::vector<int>& years);

  /// Segment sizes given the data's first year.
  int n_train(int first_year) const { return train_end - first_year + 1; }
  int n_val() const { return val_end - train_end; }
  int n_test() const { return test_end - val_end; }

  /// Ordering, coverage of the data span, >= 3 training years and >= 2
  /// years in the other segments.
  void validate(const std::vector<int>& years) const;
};

struct BacktestSettings {
  KRule k_rule;
  ScoreModelConfig score_model;
  std::vector<double> alphas = {0.2, 0.05};
  std::vector<Approach> approaches = {Approach::Sd, Approach::Conformal,
                                      Approach::Parametric};
  CdfOptions cdf;
  bool standardize_mfts = false;
  /// Re-select the component count at every origin (default) or freeze
  /// the count chosen at the first training fit.
  bool refit_k = true;
};

/// Mean interval score of a central (1-alpha) band: width plus 2/alpha
/// times the distance by which the truth escapes the band. Throws if
/// lower > upper.
double interval_score(double lower, double upper, double actual, double alpha);

/// Fraction of (age, year) pairs whose actual value lies inside the
/// closed band.
double empirical_coverage(const std::vector<IntervalBand>& bands,
                          const std::vector<Eigen::VectorXd>& actuals);

/// Absolute deviation of the achieved coverage from the nominal level.
double coverage_probability_deviation(double ecp, double alpha);

double mean_of(const std::vector<double>& values);
/// Median with the midpoint convention for even counts.
double median_of(std::vector<double> values);

/// One phase-1 calibration slice: everything tied to a single horizon.
struct HorizonCalibration {
  int horizon = 0;
  Eigen::MatrixXd residuals;  // [M x n_ages] count-scale errors
  std::vector<int> origin_years;
  Eigen::VectorXd gamma;
  std::vector<XiResult> xi;                  // parallel to settings.alphas
  std::vector<ConformalQuantiles> conformal; // parallel to settings.alphas
};

/// One phase-2 test forecast (single origin and horizon).
struct TestForecast {
  int origin_year = 0;
  int horizon = 0;
  int target_year = 0;
  Eigen::VectorXd point_counts;
  Eigen::VectorXd point_trans;
  Eigen::VectorXd variance_trans;
};

struct SexBacktest {
  Sex sex = Sex::Female;
  std::vector<HorizonCalibration> calibration;  // index h-1, h = 1..n_val-1
  std::vector<TestForecast> forecasts;          // ordered by origin, then horizon
};

/// Backtest of one (transform, model) combination over both sexes.
struct BacktestCell {
  Transform transform = Transform::CdfLogit;
  ModelKind model = ModelKind::Ufts;
  std::vector<SexBacktest> sexes;
};

/// Runs phase 1 (expanding origins through the validation segment,
/// collecting count-scale residuals per horizon) and phase 2 (refit at
/// each origin past val_end, forecasting the test segment).
BacktestCell run_backtest_cell(const LifeTableSeries& female, const LifeTableSeries& male,
                               const SplitSpec& split, Transform transform, ModelKind model,
                               const BacktestSettings& settings);

/// Per-horizon band quality for one (sex, transform, model, approach,
/// alpha) combination.
struct HorizonMetrics {
  int horizon = 0;
  int n_pairs = 0;  // evaluated (year, age) pairs
  double ecp = 0.0;
  double cpd = 0.0;
  double mean_score = 0.0;
  bool under_supported = false;
};

struct MethodReport {
  Sex sex = Sex::Female;
  Transform transform = Transform::CdfLogit;
  ModelKind model = ModelKind::Ufts;
  Approach approach = Approach::Sd;
  double alpha = 0.2;
  std::vector<HorizonMetrics> horizons;
  double mean_ecp = 0, median_ecp = 0;
  double mean_cpd = 0, median_cpd = 0;
  double mean_score = 0, median_score = 0;
  bool any_under_supported = false;
  // Smallest value across models within the same (sex, transform,
  // approach, alpha) group; filled by flag_best_models.
  bool best_mean_cpd = false, best_median_cpd = false;
  bool best_mean_score = false, best_median_score = false;
};

/// Calibration summary (sd approach) for one (sex, transform, model, alpha).
struct CalibrationReport {
  Sex sex = Sex::Female;
  Transform transform = Transform::CdfLogit;
  ModelKind model = ModelKind::Ufts;
  double alpha = 0.2;
  std::vector<double> xi;              // index h-1
  std::vector<int> n_ratios;
  std::vector<bool> under_supported;
};

struct BacktestOutcome {
  std::vector<Transform> transforms;
  std::vector<ModelKind> models;
  BacktestSettings settings;
  std::vector<MethodReport> methods;          // fixed iteration order
  std::vector<CalibrationReport> calibrations;
  std::vector<BacktestCell> cells;            // raw data, same order as combos
  bool any_under_supported = false;
};

/// Bands and metrics for one cell against the truth.
std::vector<MethodReport> summarize_cell(const BacktestCell& cell,
                                         const LifeTableSeries& female,
                                         const LifeTableSeries& male,
                                         const SplitSpec& split,
                                         const BacktestSettings& settings);

/// Full grid: every (transform, model) cell, evaluated independently
/// (optionally on a worker pool) and assembled in a fixed key order, so
/// results do not depend on scheduling.
BacktestOutcome run_full_backtest(const LifeTableSeries& female, const LifeTableSeries& male,
                                  const SplitSpec& split,
                                  const std::vector<Transform>& transforms,
                                  const std::vector<ModelKind>& models,
                                  const BacktestSettings& settings, int threads = 1);

/// Marks, within each (sex, transform, approach, alpha) group, the model
/// with the smallest mean/median CPD and interval score.
void flag_best_models(std::vector<MethodReport>& methods);

}  // namespace lifecast
