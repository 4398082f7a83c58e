#pragma once

#include <cstdint>

#include "lifecast/life_table.hpp"
#include "lifecast/transforms.hpp"

namespace lifecast {

/// Recipe for a synthetic death-count series. The surface is built in
/// logit-CDF space as mean(y) + sum_k score_k(t) basis_k(y) + noise and
/// mapped back to counts, so every year is a valid distribution. Scores
/// follow a random walk with drift, which gives forecast errors that
/// grow with the horizon. The same seed always yields the same table.
struct SynthSpec {
  int n_years = 48;
  int n_ages = 111;
  int n_components = 2;
  double noise_sd = 0.0012;
  std::uint64_t seed = 1;

  int start_year = 1975;
  double radix = 100000.0;
  Sex sex = Sex::Female;
  /// Per-component score drift is -drift_scale / k^2 (mortality shifts
  /// to older ages over time); innovation sd is innov_sd / k.
  double drift_scale = 0.06;
  double innov_sd = 0.03;
};

LifeTableSeries synth_lifetable(const SynthSpec& spec);

/// The deterministic logit-CDF mean curve used by synth_lifetable
/// (infant spike, young-adult bump, old-age hump over n_ages ages).
Eigen::VectorXd synth_mean_logit_cdf(int n_ages);

/// Orthonormal sine basis element k >= 1 over the n_ages-1 logit-CDF
/// coordinates.
Eigen::VectorXd synth_basis(int n_ages, int k);

/// Death probabilities implied by a count table through the survivorship
/// recursion: q(x) = d(x) / l(x) with l(0) = radix, l(x+1) = l(x) - d(x).
/// The last-age q is exactly 1.
QxSeries qx_from_lifetable(const LifeTableSeries& series);

/// Five-year demonstration table (1975-1979, ages 0-110+) in the
/// ten-column text format. The female table carries exactly three
/// zero-count cells (q set to 0 at three interior ages); the male table
/// has none. Deterministic content, used for the bundled sample files.
std::string sample_hmd_text(Sex sex);

}  // namespace lifecast
