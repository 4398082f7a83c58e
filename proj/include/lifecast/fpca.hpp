#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lifecast/transforms.hpp"

namespace lifecast {

enum class ModelKind { Ufts, Mfts, Mlfts };

std::string to_string(ModelKind kind);

/// How many principal components a fit keeps for forecasting.
struct KRule {
  enum class Kind { Evr, Fixed } kind = Kind::Evr;
  int fixed_k = 6;

  static KRule evr() { return {Kind::Evr, 0}; }
  static KRule fixed(int k) { return {Kind::Fixed, k}; }
};

/// Eigenvalue-ratio order selection. Candidates kappa run from 1 to
/// min(n-1, rank-1); the term for kappa is lambda_{kappa+1}/lambda_kappa
/// when lambda_kappa/lambda_1 >= delta and 1 otherwise, with
/// delta = 1/ln(max(lambda_1, n)). The level condition keeps ratios of
/// near-zero eigenvalues (0/0 noise) out of the argmin. Ties resolve to
/// the smallest kappa; an all-zero spectrum yields 1.
int select_k_evr(const Eigen::VectorXd& eigenvalues, int n);

/// One eigendecomposition of a centered data block.
struct FpcaBlock {
  Eigen::VectorXd mean;             // what the block was centered by
  Eigen::VectorXd eigenvalues;      // descending, clamped at 0
  Eigen::MatrixXd eigenfunctions;   // rows: components (orthonormal)
  Eigen::MatrixXd scores;           // [years x components] projections
  Eigen::VectorXd residual_variance;  // per coordinate, beyond k_selected
  int k_selected = 0;

  int n_components() const { return static_cast<int>(eigenvalues.size()); }
  int n_coords() const { return static_cast<int>(mean.size()); }
};

/// A fitted functional principal component model.
///
/// Ufts: `common` decomposes one sex (n_series = 1).
/// Mfts: `common` decomposes the two sexes stacked into 2A coordinates;
///       scores are shared, eigenfunction halves belong to each sex.
/// Mlfts: `common` decomposes the average of the two centered sexes;
///        `specific[s]` decomposes what the truncated common part leaves
///        behind for sex s. series_means holds the per-sex means.
struct FpcaModel {
  ModelKind kind = ModelKind::Ufts;
  Transform transform = Transform::CdfLogit;
  double radix = 100000.0;
  int n_years = 0;
  int n_coords = 0;  // per series
  int n_series = 1;
  std::vector<Sex> series_sexes;
  std::vector<int> years;

  FpcaBlock common;
  std::vector<FpcaBlock> specific;           // Mlfts only, one per series
  std::vector<Eigen::VectorXd> series_means; // Mlfts only
  std::vector<double> series_scales;         // Mfts standardization (1 otherwise)

  /// Mean curve of one series in transform space.
  Eigen::VectorXd mean_for_series(int series) const;

  /// In-sample reconstruction of year index t for one series, using
  /// k_selected components of every block.
  Eigen::VectorXd reconstruct_year(int series, int t) const;

  /// Curve implied by explicit scores. common_scores must have
  /// common.k_selected entries; specific_scores (Mlfts) must have
  /// specific[series].k_selected entries.
  Eigen::VectorXd reconstruct(int series, const Eigen::VectorXd& common_scores,
                              const Eigen::VectorXd& specific_scores = {}) const;

  /// Residual variance curve for one series (slice of the stacked curve
  /// for Mfts; common-plus-specific leftover for Mlfts).
  Eigen::VectorXd residual_variance_for_series(int series) const;
};

/// Single-series FPCA on a transform-space matrix. Requires n >= 3 years.
FpcaModel fit_ufts(const UnconstrainedSeries& series, Sex sex, const KRule& rule);

/// Joint FPCA of two series stacked coordinate-wise. standardize divides
/// each centered series by the square root of its total variance before
/// stacking (off by default; undone at reconstruction).
FpcaModel fit_mfts(const UnconstrainedSeries& female, const UnconstrainedSeries& male,
                   const KRule& rule, bool standardize = false);

/// Multilevel FPCA: a common block fitted to the average of the two
/// centered series and per-sex blocks fitted to the remainders.
FpcaModel fit_mlfts(const UnconstrainedSeries& female, const UnconstrainedSeries& male,
                    const KRule& rule);

/// Multilevel fit with a separate selection rule per block, used to hold
/// previously chosen component counts fixed across refits.
FpcaModel fit_mlfts(const UnconstrainedSeries& female, const UnconstrainedSeries& male,
                    const KRule& common_rule, const KRule& female_rule,
                    const KRule& male_rule);

/// Serialized model (means, eigenvalues, eigenfunctions, scores) for
/// inspection and golden tests.
std::string model_to_json(const FpcaModel& model);

}  // namespace lifecast
