#include "lifecast/fpca.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lifecast {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ufts: return "ufts";
    case ModelKind::Mfts: return "mfts";
    default: return "mlfts";
  }
}

int select_k_evr(const Eigen::VectorXd& eigenvalues, int n) {
  const Eigen::Index len = eigenvalues.size();
  if (len == 0) throw std::invalid_argument("empty eigenvalue list");
  if (n < 2) throw std::invalid_argument("eigenvalue-ratio selection needs n >= 2");
  int positive = 0;
  for (Eigen::Index i = 0; i < len; ++i) {
    if (eigenvalues(i) < 0.0) throw std::invalid_argument("negative eigenvalue");
    if (i > 0 && eigenvalues(i) > eigenvalues(i - 1)) {
      throw std::invalid_argument("eigenvalues must be sorted descending");
    }
    if (eigenvalues(i) > 0.0) ++positive;
  }
  if (positive == 0) return 1;

  const double delta = 1.0 / std::log(std::max(eigenvalues(0), static_cast<double>(n)));
  const int kmax = std::min({n - 1, positive - 1, static_cast<int>(len) - 1});
  int best = 1;
  double best_term = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kmax; ++k) {
    const double level = eigenvalues(k - 1) / eigenvalues(0);
    const double term = level >= delta ? eigenvalues(k) / eigenvalues(k - 1) : 1.0;
    if (term < best_term) {
      best_term = term;
      best = k;
    }
  }
  return best;
}

namespace {

int resolve_k(const KRule& rule, const Eigen::VectorXd& eigenvalues, int n, int coords) {
  if (rule.kind == KRule::Kind::Evr) return select_k_evr(eigenvalues, n);
  if (rule.fixed_k < 1 || rule.fixed_k >= n || rule.fixed_k >= coords) {
    throw std::invalid_argument("fixed component count must satisfy 1 <= k < n and k < #coordinates");
  }
  return rule.fixed_k;
}

FpcaBlock fit_block(const Eigen::MatrixXd& X, const KRule& rule) {
  const Eigen::Index n = X.rows();
  const Eigen::Index C = X.cols();
  FpcaBlock block;
  block.mean = X.colwise().mean().transpose();
  Eigen::MatrixXd centered = X.rowwise() - block.mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }

  const Eigen::Index kept = std::min<Eigen::Index>(n - 1, C);
  block.eigenvalues.resize(kept);
  block.eigenfunctions.resize(kept, C);
  const double tol = 1e-12 * std::max(1.0, std::abs(solver.eigenvalues()(C - 1)));
  for (Eigen::Index i = 0; i < kept; ++i) {
    double lam = solver.eigenvalues()(C - 1 - i);  // solver sorts ascending
    if (lam < 0.0) {
      if (lam < -tol) throw std::runtime_error("covariance eigenvalue below -1e-12");
      lam = 0.0;
    }
    block.eigenvalues(i) = lam;
    Eigen::VectorXd v = solver.eigenvectors().col(C - 1 - i);
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    if (v(peak) < 0.0) v = -v;
    block.eigenfunctions.row(i) = v.transpose();
  }

  block.scores = centered * block.eigenfunctions.transpose();
  block.k_selected = resolve_k(rule, block.eigenvalues, static_cast<int>(n),
                               static_cast<int>(C));

  const int k = block.k_selected;
  Eigen::MatrixXd residual =
      centered - block.scores.leftCols(k) * block.eigenfunctions.topRows(k);
  block.residual_variance =
      (residual.array().square().colwise().sum() / static_cast<double>(n - 1)).transpose();
  return block;
}

void check_series(const UnconstrainedSeries& series) {
  if (series.n_years() < 3) throw std::invalid_argument("model needs at least 3 years");
}

void check_pair(const UnconstrainedSeries& a, const UnconstrainedSeries& b) {
  check_series(a);
  if (a.transform != b.transform || a.radix != b.radix) {
    throw std::invalid_argument("paired series must share transform and radix");
  }
  if (a.years != b.years) throw std::invalid_argument("paired series must share years");
  if (a.values.cols() != b.values.cols()) {
    throw std::invalid_argument("paired series must share the age grid");
  }
}

}  // namespace

FpcaModel fit_ufts(const UnconstrainedSeries& series, Sex sex, const KRule& rule) {
  check_series(series);
  FpcaModel model;
  model.kind = ModelKind::Ufts;
  model.transform = series.transform;
  model.radix = series.radix;
  model.n_years = series.n_years();
  model.n_coords = series.n_coords();
  model.n_series = 1;
  model.series_sexes = {sex};
  model.years = series.years;
  model.common = fit_block(series.values, rule);
  model.series_scales = {1.0};
  return model;
}

FpcaModel fit_mfts(const UnconstrainedSeries& female, const UnconstrainedSeries& male,
                   const KRule& rule, bool standardize) {
  check_pair(female, male);
  const Eigen::Index n = female.values.rows();
  const Eigen::Index C = female.values.cols();

  FpcaModel model;
  model.kind = ModelKind::Mfts;
  model.transform = female.transform;
  model.radix = female.radix;
  model.n_years = static_cast<int>(n);
  model.n_coords = static_cast<int>(C);
  model.n_series = 2;
  model.series_sexes = {Sex::Female, Sex::Male};
  model.years = female.years;
  model.series_scales = {1.0, 1.0};

  Eigen::MatrixXd stacked(n, 2 * C);
  stacked << female.values, male.values;
  if (!standardize) {
    model.common = fit_block(stacked, rule);
    return model;
  }

  Eigen::VectorXd stacked_mean = stacked.colwise().mean().transpose();
  Eigen::MatrixXd centered = stacked.rowwise() - stacked_mean.transpose();
  for (int s = 0; s < 2; ++s) {
    double total_var =
        centered.middleCols(s * C, C).array().square().sum() / static_cast<double>(n - 1);
    double scale = total_var > 0.0 ? std::sqrt(total_var) : 1.0;
    model.series_scales[s] = scale;
    centered.middleCols(s * C, C) /= scale;
  }
  model.common = fit_block(centered, rule);
  model.common.mean = stacked_mean;  // reconstruction adds the unscaled mean
  for (int s = 0; s < 2; ++s) {
    double v = model.series_scales[s] * model.series_scales[s];
    model.common.residual_variance.segment(s * C, C) *= v;
  }
  return model;
}

FpcaModel fit_mlfts(const UnconstrainedSeries& female, const UnconstrainedSeries& male,
                    const KRule& rule) {
  return fit_mlfts(female, male, rule, rule, rule);
}

FpcaModel fit_mlfts(const UnconstrainedSeries& female, const UnconstrainedSeries& male,
                    const KRule& common_rule, const KRule& female_rule,
                    const KRule& male_rule) {
  check_pair(female, male);
  const Eigen::Index n = female.values.rows();

  FpcaModel model;
  model.kind = ModelKind::Mlfts;
  model.transform = female.transform;
  model.radix = female.radix;
  model.n_years = static_cast<int>(n);
  model.n_coords = female.n_coords();
  model.n_series = 2;
  model.series_sexes = {Sex::Female, Sex::Male};
  model.years = female.years;
  model.series_scales = {1.0, 1.0};

  model.series_means = {female.values.colwise().mean().transpose(),
                        male.values.colwise().mean().transpose()};
  Eigen::MatrixXd centered_f = female.values.rowwise() - model.series_means[0].transpose();
  Eigen::MatrixXd centered_m = male.values.rowwise() - model.series_means[1].transpose();
  Eigen::MatrixXd aggregate = 0.5 * (centered_f + centered_m);

  model.common = fit_block(aggregate, common_rule);
  const int K = model.common.k_selected;
  Eigen::MatrixXd common_fit =
      (model.common.scores.leftCols(K) * model.common.eigenfunctions.topRows(K)).rowwise() +
      model.common.mean.transpose();

  model.specific.push_back(fit_block(centered_f - common_fit, female_rule));
  model.specific.push_back(fit_block(centered_m - common_fit, male_rule));
  return model;
}

Eigen::VectorXd FpcaModel::mean_for_series(int series) const {
  switch (kind) {
    case ModelKind::Ufts:
      return common.mean;
    case ModelKind::Mfts:
      return common.mean.segment(series * n_coords, n_coords);
    default:
      return series_means[series] + common.mean + specific[series].mean;
  }
}

Eigen::VectorXd FpcaModel::reconstruct(int series, const Eigen::VectorXd& common_scores,
                                       const Eigen::VectorXd& specific_scores) const {
  if (common_scores.size() != common.k_selected) {
    throw std::invalid_argument("common score vector length must equal k_selected");
  }
  Eigen::VectorXd common_part =
      (common_scores.transpose() * common.eigenfunctions.topRows(common.k_selected))
          .transpose();
  switch (kind) {
    case ModelKind::Ufts:
      return common.mean + common_part;
    case ModelKind::Mfts:
      return common.mean.segment(series * n_coords, n_coords) +
             series_scales[series] * common_part.segment(series * n_coords, n_coords);
    default: {
      const FpcaBlock& block = specific[series];
      if (specific_scores.size() != block.k_selected) {
        throw std::invalid_argument("specific score vector length must equal k_selected");
      }
      Eigen::VectorXd specific_part =
          (specific_scores.transpose() * block.eigenfunctions.topRows(block.k_selected))
              .transpose();
      return series_means[series] + common.mean + common_part + block.mean + specific_part;
    }
  }
}

Eigen::VectorXd FpcaModel::reconstruct_year(int series, int t) const {
  Eigen::VectorXd common_scores =
      common.scores.row(t).head(common.k_selected).transpose();
  if (kind != ModelKind::Mlfts) return reconstruct(series, common_scores);
  Eigen::VectorXd specific_scores =
      specific[series].scores.row(t).head(specific[series].k_selected).transpose();
  return reconstruct(series, common_scores, specific_scores);
}

Eigen::VectorXd FpcaModel::residual_variance_for_series(int series) const {
  switch (kind) {
    case ModelKind::Ufts:
      return common.residual_variance;
    case ModelKind::Mfts:
      return common.residual_variance.segment(series * n_coords, n_coords);
    default:
      return specific[series].residual_variance;
  }
}

namespace {

nlohmann::json to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(to_json(Eigen::VectorXd(m.row(i))));
  }
  return rows;
}

nlohmann::json block_to_json(const FpcaBlock& block) {
  return {{"mean", to_json(block.mean)},
          {"eigenvalues", to_json(block.eigenvalues)},
          {"eigenfunctions", to_json(block.eigenfunctions)},
          {"scores", to_json(block.scores)},
          {"residual_variance", to_json(block.residual_variance)},
          {"k_selected", block.k_selected}};
}

}  // namespace

std::string model_to_json(const FpcaModel& model) {
  nlohmann::json j;
  j["kind"] = to_string(model.kind);
  j["transform"] = to_string(model.transform);
  j["radix"] = model.radix;
  j["n_years"] = model.n_years;
  j["n_coords"] = model.n_coords;
  j["n_series"] = model.n_series;
  j["years"] = model.years;
  nlohmann::json sexes = nlohmann::json::array();
  for (Sex s : model.series_sexes) sexes.push_back(to_string(s));
  j["series_sexes"] = sexes;
  j["common"] = block_to_json(model.common);
  if (!model.specific.empty()) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const FpcaBlock& b : model.specific) blocks.push_back(block_to_json(b));
    j["specific"] = blocks;
    nlohmann::json means = nlohmann::json::array();
    for (const Eigen::VectorXd& m : model.series_means) means.push_back(to_json(m));
    j["series_means"] = means;
  }
  j["series_scales"] = model.series_scales;
  return j.dump(2);
}

}  // namespace lifecast
