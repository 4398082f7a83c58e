#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lifecast/life_table.hpp"

namespace lifecast {

/// One parsed row of an HMD-style period life table. qx and dx are
/// required; the remaining columns may be missing ("." in the file).
struct HmdRow {
  int year = 0;
  std::string age_label;
  std::optional<double> mx;
  double qx = 0.0;
  std::optional<double> ax;
  std::optional<double> lx;
  double dx = 0.0;
  std::optional<double> Lx;
  std::optional<double> Tx;
  std::optional<double> ex;
};

/// A complete HMD table: the raw rows plus the two series the pipeline
/// consumes. `deaths` holds the published dx column (rescaled to the
/// radix); more precise counts come from lifetable_from_qx(qx).
struct HmdTable {
  std::vector<HmdRow> rows;
  QxSeries qx;
  LifeTableSeries deaths;
};

/// Reads a whitespace-delimited HMD life table. Lines before the
/// "Year Age mx qx ..." header are treated as preamble and skipped.
/// Throws ParseError for a missing header, "." in qx or dx, year gaps,
/// or an inconsistent age grid between years.
HmdTable read_hmd_lifetable(const std::string& path, Sex sex, double radix = 100000.0);
HmdTable read_hmd_lifetable(std::istream& in, Sex sex, double radix,
                            const std::string& origin);

/// Writes rows back in the column layout and printed precision used by
/// read_hmd_lifetable, so write(read(f)) reproduces f's numeric content.
void write_hmd_lifetable(std::ostream& out, const std::vector<HmdRow>& rows,
                         const std::string& title);
void write_hmd_lifetable(const std::string& path, const std::vector<HmdRow>& rows,
                         const std::string& title);

/// Builds full HMD rows from death probabilities, filling the derived
/// columns (mx, lx, Lx, Tx, ex) with standard period life-table identities.
std::vector<HmdRow> make_hmd_rows(const QxSeries& qx, double radix = 100000.0);

/// Long-format "year,age,value" export used by the CLI. One label per
/// value column (a logit-CDF series has one column fewer than its grid).
void write_series_csv(std::ostream& out, const std::vector<std::string>& labels,
                      const std::vector<int>& years, const Eigen::MatrixXd& values);

}  // namespace lifecast
