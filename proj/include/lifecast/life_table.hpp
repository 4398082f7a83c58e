#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lifecast {

enum class Sex { Female, Male, Other };

std::string to_string(Sex sex);

/// Ordered single-year age labels. The last label may be open-ended
/// ("110+"), covering every age at or above its numeric value.
class AgeGrid {
 public:
  /// Parses labels such as "0", "1", ..., "110+". Numeric values must be
  /// strictly increasing and at least three labels are required.
  static AgeGrid from_labels(std::vector<std::string> labels);

  /// Grid 0, 1, ..., count-2, "(count-1)+". The standard mortality grid
  /// is single_years(111): ages 0..109 plus 110+.
  static AgeGrid single_years(int count, bool open_ended_last = true);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& ages() const { return ages_; }
  int size() const { return static_cast<int>(labels_.size()); }
  bool open_ended_last() const { return open_ended_last_; }

  bool operator==(const AgeGrid& other) const {
    return labels_ == other.labels_;
  }

 private:
  AgeGrid() = default;
  std::vector<std::string> labels_;
  std::vector<double> ages_;
  bool open_ended_last_ = false;
};

/// Death counts by calendar year and age. Every row (year) is rescaled at
/// construction so it sums to the radix; a table whose rows cannot be
/// rescaled (nonnegative with at least one positive entry) is rejected.
class LifeTableSeries {
 public:
  LifeTableSeries(AgeGrid grid, std::vector<int> years, Sex sex,
                  Eigen::MatrixXd values, double radix = 100000.0);

  const AgeGrid& grid() const { return grid_; }
  const std::vector<int>& years() const { return years_; }
  Sex sex() const { return sex_; }
  double radix() const { return radix_; }

  /// Rows are years, columns are ages; each row sums to radix().
  const Eigen::MatrixXd& values() const { return values_; }

  int n_years() const { return static_cast<int>(years_.size()); }
  int n_ages() const { return grid_.size(); }
  int first_year() const { return years_.front(); }
  int last_year() const { return years_.back(); }

  /// Copy restricted to years [first, last], both inclusive.
  LifeTableSeries slice_years(int first, int last) const;

 private:
  AgeGrid grid_;
  std::vector<int> years_;
  Sex sex_;
  Eigen::MatrixXd values_;
  double radix_;
};

/// Death probabilities q(x) by year and age. Hold the same year/age layout
/// as LifeTableSeries. validate() enforces 0 <= q <= 1 everywhere and
/// q = 1 at the last age.
struct QxSeries {
  AgeGrid grid;
  std::vector<int> years;
  Sex sex = Sex::Female;
  Eigen::MatrixXd values;

  /// Checks invariants; throws std::invalid_argument on violation.
  /// Entries within 1e-6 of 1 at the last age are snapped to exactly 1.
  void validate();

  int n_years() const { return static_cast<int>(years.size()); }
  int n_ages() const { return grid.size(); }
};

/// Survivorship recursion: l(0) = radix, d(x) = l(x) q(x),
/// l(x+1) = l(x) - d(x). Because q = 1 at the last age, each year's counts
/// sum to the radix exactly. Throws on invalid q.
LifeTableSeries lifetable_from_qx(QxSeries qx, double radix = 100000.0);

}  // namespace lifecast
