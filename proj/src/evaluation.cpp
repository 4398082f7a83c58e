#include "lifecast/evaluation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace lifecast {

std::string to_string(Approach approach) {
  switch (approach) {
    case Approach::Sd: return "sd";
    case Approach::Conformal: return "conformal";
    default: return "parametric";
  }
}

SplitSpec SplitSpec::equal_thirds(const std::vector<int>& years) {
  if (years.size() < 7) {
    throw std::invalid_argument("equal-thirds split needs at least 7 years");
  }
  const int n = static_cast<int>(years.size());
  const int base = n / 3;
  const int train = base + n % 3;  // remainder goes to training
  SplitSpec split;
  split.train_end = years[train - 1];
  split.val_end = years[train + base - 1];
  split.test_end = years[n - 1];
  return split;
}

void SplitSpec::validate(const std::vector<int>& years) const {
  if (years.empty()) throw std::invalid_argument("split over an empty year range");
  if (train_end < years.front() + 2) {
    throw std::invalid_argument("training segment needs at least 3 years");
  }
  if (val_end < train_end + 2) {
    throw std::invalid_argument("validation segment needs at least 2 years");
  }
  if (test_end < val_end + 2) {
    throw std::invalid_argument("test segment needs at least 2 years");
  }
  if (test_end != years.back()) {
    throw std::invalid_argument("split must end at the last data year");
  }
}

double interval_score(double lower, double upper, double actual, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (lower > upper) throw std::invalid_argument("interval with lower > upper");
  double score = upper - lower;
  if (actual < lower) score += 2.0 / alpha * (lower - actual);
  if (actual > upper) score += 2.0 / alpha * (actual - upper);
  return score;
}

double empirical_coverage(const std::vector<IntervalBand>& bands,
                          const std::vector<Eigen::VectorXd>& actuals) {
  if (bands.empty() || bands.size() != actuals.size()) {
    throw std::invalid_argument("coverage needs matching, nonempty band and actual lists");
  }
  long covered = 0;
  long total = 0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const IntervalBand& band = bands[i];
    const Eigen::VectorXd& actual = actuals[i];
    if (band.lower.size() != actual.size()) {
      throw std::invalid_argument("band and actual curve lengths differ");
    }
    for (Eigen::Index j = 0; j < actual.size(); ++j) {
      ++total;
      if (actual(j) >= band.lower(j) && actual(j) <= band.upper(j)) ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(total);
}

double coverage_probability_deviation(double ecp, double alpha) {
  return std::abs(ecp - (1.0 - alpha));
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

/// Component counts captured at the first fit when refit_k is off.
struct FrozenK {
  bool recorded = false;
  std::array<int, 2> ufts{0, 0};
  int mfts = 0;
  int mlfts_common = 0;
  std::array<int, 2> mlfts_specific{0, 0};
};

struct OriginForecasts {
  // [sex][h-1]
  std::array<std::vector<Eigen::VectorXd>, 2> point_trans;
  std::array<std::vector<Eigen::VectorXd>, 2> variance_trans;
  std::array<std::vector<Eigen::VectorXd>, 2> point_counts;
};

struct BlockScoreForecast {
  std::vector<Eigen::VectorXd> point;     // [h-1], one entry per kept component
  std::vector<Eigen::VectorXd> variance;
};

BlockScoreForecast forecast_block_scores(const FpcaBlock& block, int h_max,
                                         const ScoreModelConfig& config) {
  BlockScoreForecast bf;
  bf.point.assign(h_max, Eigen::VectorXd(block.k_selected));
  bf.variance.assign(h_max, Eigen::VectorXd(block.k_selected));
  for (int k = 0; k < block.k_selected; ++k) {
    const ScoreForecast sf = forecast_scores(block.scores.col(k), h_max, config);
    for (int h = 1; h <= h_max; ++h) {
      bf.point[h - 1](k) = sf.point[h - 1];
      bf.variance[h - 1](k) = sf.variance[h - 1];
    }
  }
  return bf;
}

// sum_k vars(k) psi_k(j)^2 over the kept components, restricted to the
// coordinate window [offset, offset + len)
Eigen::VectorXd component_variance(const FpcaBlock& block, const Eigen::VectorXd& vars,
                                   int offset, int len) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(len);
  for (int k = 0; k < block.k_selected; ++k) {
    out.array() += vars(k) *
                   block.eigenfunctions.row(k).segment(offset, len).transpose().array().square();
  }
  return out;
}

OriginForecasts forecast_origin(const LifeTableSeries& female, const LifeTableSeries& male,
                                int origin_year, int h_max, Transform transform,
                                ModelKind model, const BacktestSettings& settings,
                                FrozenK& frozen) {
  const LifeTableSeries train_f = female.slice_years(female.first_year(), origin_year);
  const LifeTableSeries train_m = male.slice_years(male.first_year(), origin_year);
  const UnconstrainedSeries tf = forward_transform(transform, train_f, settings.cdf);
  const UnconstrainedSeries tm = forward_transform(transform, train_m, settings.cdf);
  const bool freeze = !settings.refit_k;
  const bool use_frozen = freeze && frozen.recorded;

  OriginForecasts out;
  for (int s = 0; s < 2; ++s) {
    out.point_trans[s].resize(h_max);
    out.variance_trans[s].resize(h_max);
    out.point_counts[s].resize(h_max);
  }

  switch (model) {
    case ModelKind::Ufts: {
      for (int s = 0; s < 2; ++s) {
        const KRule rule = use_frozen ? KRule::fixed(frozen.ufts[s]) : settings.k_rule;
        const FpcaModel fit =
            fit_ufts(s == 0 ? tf : tm, s == 0 ? train_f.sex() : train_m.sex(), rule);
        if (freeze && !frozen.recorded) frozen.ufts[s] = fit.common.k_selected;
        const BlockScoreForecast bf =
            forecast_block_scores(fit.common, h_max, settings.score_model);
        for (int h = 1; h <= h_max; ++h) {
          out.point_trans[s][h - 1] = fit.reconstruct(0, bf.point[h - 1]);
          out.variance_trans[s][h - 1] =
              fit.common.residual_variance +
              component_variance(fit.common, bf.variance[h - 1], 0, fit.n_coords);
        }
      }
      break;
    }
    case ModelKind::Mfts: {
      const KRule rule = use_frozen ? KRule::fixed(frozen.mfts) : settings.k_rule;
      const FpcaModel fit = fit_mfts(tf, tm, rule, settings.standardize_mfts);
      if (freeze && !frozen.recorded) frozen.mfts = fit.common.k_selected;
      const BlockScoreForecast bf =
          forecast_block_scores(fit.common, h_max, settings.score_model);
      for (int s = 0; s < 2; ++s) {
        const double scale2 = fit.series_scales[s] * fit.series_scales[s];
        for (int h = 1; h <= h_max; ++h) {
          out.point_trans[s][h - 1] = fit.reconstruct(s, bf.point[h - 1]);
          out.variance_trans[s][h - 1] =
              fit.residual_variance_for_series(s) +
              scale2 * component_variance(fit.common, bf.variance[h - 1], s * fit.n_coords,
                                          fit.n_coords);
        }
      }
      break;
    }
    default: {
      const KRule common_rule =
          use_frozen ? KRule::fixed(frozen.mlfts_common) : settings.k_rule;
      const KRule female_rule =
          use_frozen ? KRule::fixed(frozen.mlfts_specific[0]) : settings.k_rule;
      const KRule male_rule =
          use_frozen ? KRule::fixed(frozen.mlfts_specific[1]) : settings.k_rule;
      const FpcaModel fit = fit_mlfts(tf, tm, common_rule, female_rule, male_rule);
      if (freeze && !frozen.recorded) {
        frozen.mlfts_common = fit.common.k_selected;
        frozen.mlfts_specific = {fit.specific[0].k_selected, fit.specific[1].k_selected};
      }
      const BlockScoreForecast common_bf =
          forecast_block_scores(fit.common, h_max, settings.score_model);
      for (int s = 0; s < 2; ++s) {
        const BlockScoreForecast spec_bf =
            forecast_block_scores(fit.specific[s], h_max, settings.score_model);
        for (int h = 1; h <= h_max; ++h) {
          out.point_trans[s][h - 1] =
              fit.reconstruct(s, common_bf.point[h - 1], spec_bf.point[h - 1]);
          out.variance_trans[s][h - 1] =
              fit.residual_variance_for_series(s) +
              component_variance(fit.common, common_bf.variance[h - 1], 0, fit.n_coords) +
              component_variance(fit.specific[s], spec_bf.variance[h - 1], 0, fit.n_coords);
        }
      }
      break;
    }
  }
  if (freeze) frozen.recorded = true;

  for (int s = 0; s < 2; ++s) {
    for (int h = 1; h <= h_max; ++h) {
      out.point_counts[s][h - 1] =
          inverse_transform_curve(transform, out.point_trans[s][h - 1], female.radix());
    }
  }
  return out;
}

std::vector<CalibrationReport> calibration_reports(const BacktestCell& cell,
                                                   const BacktestSettings& settings) {
  std::vector<CalibrationReport> out;
  for (const SexBacktest& sb : cell.sexes) {
    for (std::size_t ai = 0; ai < settings.alphas.size(); ++ai) {
      CalibrationReport report;
      report.sex = sb.sex;
      report.transform = cell.transform;
      report.model = cell.model;
      report.alpha = settings.alphas[ai];
      for (const HorizonCalibration& hc : sb.calibration) {
        report.xi.push_back(hc.xi[ai].xi);
        report.n_ratios.push_back(hc.xi[ai].n_ratios);
        report.under_supported.push_back(hc.xi[ai].under_supported);
      }
      out.push_back(std::move(report));
    }
  }
  return out;
}

}  // namespace

BacktestCell run_backtest_cell(const LifeTableSeries& female, const LifeTableSeries& male,
                               const SplitSpec& split, Transform transform, ModelKind model,
                               const BacktestSettings& settings) {
  if (female.years() != male.years()) {
    throw std::invalid_argument("sex series must cover the same years");
  }
  if (!(female.grid() == male.grid())) {
    throw std::invalid_argument("sex series must share the age grid");
  }
  if (female.radix() != male.radix()) {
    throw std::invalid_argument("sex series must share the radix");
  }
  split.validate(female.years());
  if (settings.alphas.empty()) throw std::invalid_argument("no coverage levels requested");
  for (double alpha : settings.alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  }

  BacktestCell cell;
  cell.transform = transform;
  cell.model = model;
  cell.sexes.resize(2);
  cell.sexes[0].sex = female.sex();
  cell.sexes[1].sex = male.sex();

  const int n_ages = female.n_ages();
  const int n_val = split.n_val();
  const int max_h1 = n_val - 1;  // horizon n_val would leave a single residual

  for (int s = 0; s < 2; ++s) {
    cell.sexes[s].calibration.resize(max_h1);
    for (int h = 1; h <= max_h1; ++h) {
      cell.sexes[s].calibration[h - 1].horizon = h;
      cell.sexes[s].calibration[h - 1].residuals.resize(n_val - h + 1, n_ages);
    }
  }

  FrozenK frozen;

  // Phase 1: residuals against the validation segment.
  for (int origin = split.train_end; origin < split.val_end; ++origin) {
    const int h_max = std::min(max_h1, split.val_end - origin);
    const OriginForecasts fc =
        forecast_origin(female, male, origin, h_max, transform, model, settings, frozen);
    const int row = origin - split.train_end;
    for (int s = 0; s < 2; ++s) {
      const LifeTableSeries& truth = s == 0 ? female : male;
      for (int h = 1; h <= h_max; ++h) {
        const int t = origin + h - truth.first_year();
        HorizonCalibration& hc = cell.sexes[s].calibration[h - 1];
        hc.residuals.row(row) =
            truth.values().row(t) - fc.point_counts[s][h - 1].transpose();
        hc.origin_years.push_back(origin);
      }
    }
  }

  for (int s = 0; s < 2; ++s) {
    for (HorizonCalibration& hc : cell.sexes[s].calibration) {
      hc.gamma = functional_sd(hc.residuals);
      for (double alpha : settings.alphas) {
        hc.xi.push_back(calibrate_xi(hc.residuals, hc.gamma, alpha));
        hc.conformal.push_back(conformal_quantiles(hc.residuals, alpha));
      }
    }
  }

  // Phase 2: refit at every origin past the validation segment and
  // forecast the remaining test years.
  for (int origin = split.val_end; origin < split.test_end; ++origin) {
    const int h_max = split.test_end - origin;
    OriginForecasts fc =
        forecast_origin(female, male, origin, h_max, transform, model, settings, frozen);
    for (int s = 0; s < 2; ++s) {
      for (int h = 1; h <= h_max; ++h) {
        TestForecast forecast;
        forecast.origin_year = origin;
        forecast.horizon = h;
        forecast.target_year = origin + h;
        forecast.point_counts = std::move(fc.point_counts[s][h - 1]);
        forecast.point_trans = std::move(fc.point_trans[s][h - 1]);
        forecast.variance_trans = std::move(fc.variance_trans[s][h - 1]);
        cell.sexes[s].forecasts.push_back(std::move(forecast));
      }
    }
  }
  return cell;
}

std::vector<MethodReport> summarize_cell(const BacktestCell& cell,
                                         const LifeTableSeries& female,
                                         const LifeTableSeries& male,
                                         const SplitSpec& split,
                                         const BacktestSettings& settings) {
  const int h_report = std::min(split.n_val() - 1, split.n_test());
  std::vector<MethodReport> reports;
  for (std::size_t s = 0; s < cell.sexes.size(); ++s) {
    const SexBacktest& sb = cell.sexes[s];
    const LifeTableSeries& truth = s == 0 ? female : male;
    for (Approach approach : settings.approaches) {
      for (std::size_t ai = 0; ai < settings.alphas.size(); ++ai) {
        const double alpha = settings.alphas[ai];
        MethodReport report;
        report.sex = sb.sex;
        report.transform = cell.transform;
        report.model = cell.model;
        report.approach = approach;
        report.alpha = alpha;
        std::vector<double> ecps, cpds, scores;
        for (int h = 1; h <= h_report; ++h) {
          const HorizonCalibration& hc = sb.calibration[h - 1];
          std::vector<IntervalBand> bands;
          std::vector<Eigen::VectorXd> actuals;
          double score_sum = 0.0;
          long score_count = 0;
          for (const TestForecast& tf : sb.forecasts) {
            if (tf.horizon != h) continue;
            IntervalBand band;
            switch (approach) {
              case Approach::Sd:
                band = sd_band(tf.point_counts, hc.gamma, hc.xi[ai].xi, alpha);
                break;
              case Approach::Conformal:
                band = conformal_band(tf.point_counts, hc.conformal[ai], alpha);
                break;
              default:
                band = parametric_band(tf.point_trans, tf.variance_trans, alpha,
                                       cell.transform, truth.radix());
                break;
            }
            Eigen::VectorXd actual =
                truth.values().row(tf.target_year - truth.first_year()).transpose();
            for (Eigen::Index j = 0; j < actual.size(); ++j) {
              score_sum += interval_score(band.lower(j), band.upper(j), actual(j), alpha);
            }
            score_count += actual.size();
            bands.push_back(std::move(band));
            actuals.push_back(std::move(actual));
          }
          HorizonMetrics hm;
          hm.horizon = h;
          hm.n_pairs = static_cast<int>(score_count);
          hm.ecp = empirical_coverage(bands, actuals);
          hm.cpd = coverage_probability_deviation(hm.ecp, alpha);
          hm.mean_score = score_sum / static_cast<double>(score_count);
          switch (approach) {
            case Approach::Sd:
              hm.under_supported = hc.xi[ai].under_supported;
              break;
            case Approach::Conformal:
              hm.under_supported = hc.conformal[ai].under_supported;
              break;
            default:
              hm.under_supported = false;
              break;
          }
          report.any_under_supported = report.any_under_supported || hm.under_supported;
          ecps.push_back(hm.ecp);
          cpds.push_back(hm.cpd);
          scores.push_back(hm.mean_score);
          report.horizons.push_back(std::move(hm));
        }
        report.mean_ecp = mean_of(ecps);
        report.median_ecp = median_of(ecps);
        report.mean_cpd = mean_of(cpds);
        report.median_cpd = median_of(cpds);
        report.mean_score = mean_of(scores);
        report.median_score = median_of(scores);
        reports.push_back(std::move(report));
      }
    }
  }
  return reports;
}

void flag_best_models(std::vector<MethodReport>& methods) {
  std::map<std::tuple<int, int, int, double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const MethodReport& m = methods[i];
    groups[{static_cast<int>(m.sex), static_cast<int>(m.transform),
            static_cast<int>(m.approach), m.alpha}]
        .push_back(i);
  }
  for (auto& [key, members] : groups) {
    (void)key;
    auto mark = [&](double MethodReport::* value, bool MethodReport::* flag) {
      std::size_t best = members.front();
      for (std::size_t i : members) {
        if (methods[i].*value < methods[best].*value) best = i;
      }
      methods[best].*flag = true;
    };
    mark(&MethodReport::mean_cpd, &MethodReport::best_mean_cpd);
    mark(&MethodReport::median_cpd, &MethodReport::best_median_cpd);
    mark(&MethodReport::mean_score, &MethodReport::best_mean_score);
    mark(&MethodReport::median_score, &MethodReport::best_median_score);
  }
}

BacktestOutcome run_full_backtest(const LifeTableSeries& female, const LifeTableSeries& male,
                                  const SplitSpec& split,
                                  const std::vector<Transform>& transforms,
                                  const std::vector<ModelKind>& models,
                                  const BacktestSettings& settings, int threads) {
  if (transforms.empty() || models.empty()) {
    throw std::invalid_argument("at least one transform and one model are required");
  }
  BacktestOutcome out;
  out.transforms = transforms;
  out.models = models;
  out.settings = settings;

  const int n_models = static_cast<int>(models.size());
  const int n_cells = static_cast<int>(transforms.size()) * n_models;
  out.cells.resize(n_cells);
  std::vector<std::vector<MethodReport>> method_lists(n_cells);
  std::vector<std::vector<CalibrationReport>> calib_lists(n_cells);
  std::vector<std::exception_ptr> errors(n_cells);

  auto run_cell = [&](int idx) {
    try {
      const Transform transform = transforms[idx / n_models];
      const ModelKind model = models[idx % n_models];
      BacktestCell cell = run_backtest_cell(female, male, split, transform, model, settings);
      method_lists[idx] = summarize_cell(cell, female, male, split, settings);
      calib_lists[idx] = calibration_reports(cell, settings);
      out.cells[idx] = std::move(cell);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  };

  const int workers = std::max(1, std::min(threads, n_cells));
  if (workers == 1) {
    for (int i = 0; i < n_cells; ++i) run_cell(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) run_cell(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (int i = 0; i < n_cells; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  // Assembly in cell order keeps the outcome independent of scheduling.
  for (int i = 0; i < n_cells; ++i) {
    for (MethodReport& m : method_lists[i]) out.methods.push_back(std::move(m));
    for (CalibrationReport& c : calib_lists[i]) out.calibrations.push_back(std::move(c));
  }
  flag_best_models(out.methods);
  for (const MethodReport& m : out.methods) {
    out.any_under_supported = out.any_under_supported || m.any_under_supported;
  }
  return out;
}

}  // namespace lifecast
