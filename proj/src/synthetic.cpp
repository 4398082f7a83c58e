#include "lifecast/synthetic.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lifecast/hmd_io.hpp"

namespace lifecast {

Eigen::VectorXd synth_mean_logit_cdf(int n_ages) {
  const int A = n_ages;
  Eigen::VectorXd density(A);
  for (int u = 0; u < A; ++u) {
    double infant = 0.030 * std::exp(-u / 1.4);
    double young = 0.012 * std::exp(-0.5 * std::pow((u - 0.20 * A) / (0.08 * A), 2));
    double hump = std::exp(-0.5 * std::pow((u - 0.76 * A) / (0.095 * A), 2));
    density(u) = infant + young + hump + 0.004;
  }
  density /= density.sum();
  Eigen::VectorXd L(A - 1);
  double cum = 0.0;
  for (int u = 0; u + 1 < A; ++u) {
    cum += density(u);
    L(u) = std::log(cum / (1.0 - cum));
  }
  return L;
}

Eigen::VectorXd synth_basis(int n_ages, int k) {
  const int Y = n_ages - 1;
  Eigen::VectorXd b(Y);
  double scale = std::sqrt(2.0 / Y);
  for (int y = 0; y < Y; ++y) {
    b(y) = scale * std::sin(M_PI * k * (y + 0.5) / Y);
  }
  return b;
}

LifeTableSeries synth_lifetable(const SynthSpec& spec) {
  if (spec.n_years < 3) throw std::invalid_argument("synthetic series needs n_years >= 3");
  if (spec.n_ages < 3) throw std::invalid_argument("synthetic series needs n_ages >= 3");
  if (spec.n_components < 1 || spec.n_components >= spec.n_ages - 1) {
    throw std::invalid_argument("n_components must be in [1, n_ages-2]");
  }
  if (spec.noise_sd < 0.0) throw std::invalid_argument("noise_sd must be nonnegative");

  const int n = spec.n_years;
  const int Y = spec.n_ages - 1;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd L = synth_mean_logit_cdf(spec.n_ages).transpose().replicate(n, 1);
  for (int k = 1; k <= spec.n_components; ++k) {
    const double drift = -spec.drift_scale / (k * k);
    const double innov = spec.innov_sd / k;
    Eigen::VectorXd basis = synth_basis(spec.n_ages, k);
    double score = 0.0;
    for (int t = 0; t < n; ++t) {
      score += drift + innov * gauss(rng);
      L.row(t) += score * basis.transpose();
    }
  }
  if (spec.noise_sd > 0.0) {
    for (int t = 0; t < n; ++t) {
      for (int y = 0; y < Y; ++y) L(t, y) += spec.noise_sd * gauss(rng);
    }
  }

  std::vector<int> years(n);
  for (int t = 0; t < n; ++t) years[t] = spec.start_year + t;
  UnconstrainedSeries series{Transform::CdfLogit, spec.radix, years, std::move(L)};
  return cdf_inverse(series, AgeGrid::single_years(spec.n_ages), spec.sex);
}

QxSeries qx_from_lifetable(const LifeTableSeries& series) {
  QxSeries qx{series.grid(), series.years(), series.sex(),
              Eigen::MatrixXd(series.n_years(), series.n_ages())};
  const int last = series.n_ages() - 1;
  for (int t = 0; t < series.n_years(); ++t) {
    double survivors = series.radix();
    for (int a = 0; a < last; ++a) {
      const double deaths = series.values()(t, a);
      qx.values(t, a) = survivors > 0.0 ? deaths / survivors : 1.0;
      survivors -= deaths;
    }
    qx.values(t, last) = 1.0;
  }
  qx.validate();
  return qx;
}

std::string sample_hmd_text(Sex sex) {
  SynthSpec spec;
  spec.n_years = 5;
  spec.seed = sex == Sex::Female ? 424201 : 424202;
  spec.sex = sex;
  QxSeries qx = qx_from_lifetable(synth_lifetable(spec));
  if (sex == Sex::Female) {
    // three interior zero-count cells, exercising the zero-handling paths
    qx.values(1, 30) = 0.0;
    qx.values(2, 57) = 0.0;
    qx.values(3, 84) = 0.0;
  }
  std::ostringstream out;
  write_hmd_lifetable(out, make_hmd_rows(qx, spec.radix),
                      "Sample, " + to_string(sex) + ", period life table (demonstration data)");
  return out.str();
}

}  // namespace lifecast
