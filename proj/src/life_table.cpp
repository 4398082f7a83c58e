#include "lifecast/life_table.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace lifecast {

std::string to_string(Sex sex) {
  switch (sex) {
    case Sex::Female: return "female";
    case Sex::Male: return "male";
    default: return "other";
  }
}

namespace {

void check_years(const std::vector<int>& years) {
  if (years.empty()) throw std::invalid_argument("year list is empty");
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] != years[i - 1] + 1) {
      throw std::invalid_argument("year gap at " + std::to_string(years[i - 1] + 1));
    }
  }
}

}  // namespace

AgeGrid AgeGrid::from_labels(std::vector<std::string> labels) {
  if (labels.size() < 3) throw std::invalid_argument("age grid needs at least 3 ages");
  AgeGrid grid;
  grid.ages_.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& label = labels[i];
    bool plus = !label.empty() && label.back() == '+';
    if (plus && i + 1 != labels.size()) {
      throw std::invalid_argument("open-ended age '" + label + "' must be the last label");
    }
    std::string numeric = plus ? label.substr(0, label.size() - 1) : label;
    std::size_t pos = 0;
    double age = 0.0;
    try {
      age = std::stod(numeric, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad age label '" + label + "'");
    }
    if (pos != numeric.size()) throw std::invalid_argument("bad age label '" + label + "'");
    if (!grid.ages_.empty() && age <= grid.ages_.back()) {
      throw std::invalid_argument("age labels must be strictly increasing at '" + label + "'");
    }
    grid.ages_.push_back(age);
    grid.open_ended_last_ = plus;
  }
  grid.labels_ = std::move(labels);
  return grid;
}

AgeGrid AgeGrid::single_years(int count, bool open_ended_last) {
  if (count < 3) throw std::invalid_argument("age grid needs at least 3 ages");
  std::vector<std::string> labels;
  labels.reserve(count);
  for (int a = 0; a < count; ++a) {
    std::string label = std::to_string(a);
    if (a == count - 1 && open_ended_last) label += '+';
    labels.push_back(std::move(label));
  }
  return from_labels(std::move(labels));
}

LifeTableSeries::LifeTableSeries(AgeGrid grid, std::vector<int> years, Sex sex,
                                 Eigen::MatrixXd values, double radix)
    : grid_(std::move(grid)), years_(std::move(years)), sex_(sex),
      values_(std::move(values)), radix_(radix) {
  check_years(years_);
  if (!(radix_ > 0.0)) throw std::invalid_argument("radix must be positive");
  if (values_.rows() != static_cast<Eigen::Index>(years_.size()) ||
      values_.cols() != grid_.size()) {
    throw std::invalid_argument("death count matrix shape does not match years x ages");
  }
  for (Eigen::Index t = 0; t < values_.rows(); ++t) {
    double sum = 0.0;
    for (Eigen::Index a = 0; a < values_.cols(); ++a) {
      double v = values_(t, a);
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("negative or non-finite death count in year " +
                                    std::to_string(years_[t]));
      }
      sum += v;
    }
    if (sum <= 0.0) {
      throw std::invalid_argument("year " + std::to_string(years_[t]) +
                                  " has no positive death count");
    }
    values_.row(t) *= radix_ / sum;
  }
}

LifeTableSeries LifeTableSeries::slice_years(int first, int last) const {
  if (first > last || first < years_.front() || last > years_.back()) {
    throw std::invalid_argument("year slice out of range");
  }
  int offset = first - years_.front();
  int count = last - first + 1;
  std::vector<int> sub(years_.begin() + offset, years_.begin() + offset + count);
  return LifeTableSeries(grid_, std::move(sub), sex_,
                         values_.middleRows(offset, count), radix_);
}

void QxSeries::validate() {
  check_years(years);
  if (values.rows() != static_cast<Eigen::Index>(years.size()) || values.cols() != grid.size()) {
    throw std::invalid_argument("qx matrix shape does not match years x ages");
  }
  const Eigen::Index last = values.cols() - 1;
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    for (Eigen::Index a = 0; a < values.cols(); ++a) {
      double q = values(t, a);
      if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
        throw std::invalid_argument("q outside [0,1] in year " + std::to_string(years[t]) +
                                    " age index " + std::to_string(a));
      }
    }
    if (std::abs(values(t, last) - 1.0) > 1e-6) {
      throw std::invalid_argument("q at last age must be 1 in year " + std::to_string(years[t]));
    }
    values(t, last) = 1.0;
  }
}

LifeTableSeries lifetable_from_qx(QxSeries qx, double radix) {
  qx.validate();
  Eigen::MatrixXd deaths(qx.values.rows(), qx.values.cols());
  for (Eigen::Index t = 0; t < qx.values.rows(); ++t) {
    double survivors = radix;
    for (Eigen::Index a = 0; a < qx.values.cols(); ++a) {
      double d = survivors * qx.values(t, a);
      deaths(t, a) = d;
      survivors -= d;
    }
  }
  return LifeTableSeries(qx.grid, qx.years, qx.sex, std::move(deaths), radix);
}

}  // namespace lifecast
