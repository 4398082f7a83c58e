#include "lifecast/hmd_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "lifecast/errors.hpp"

namespace lifecast {

namespace {

const std::vector<std::string> kHeader = {"Year", "Age", "mx", "qx", "ax",
                                          "lx",   "dx",  "Lx", "Tx", "ex"};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::optional<double> parse_field(const std::string& tok, const std::string& origin,
                                  int line_no) {
  if (tok == ".") return std::nullopt;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": bad numeric field '" + tok + "'");
  }
  if (pos != tok.size()) {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": bad numeric field '" + tok + "'");
  }
  return v;
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v, int decimals) {
  return v ? fmt(*v, decimals) : ".";
}

}  // namespace

HmdTable read_hmd_lifetable(std::istream& in, Sex sex, double radix,
                            const std::string& origin) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<HmdRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (!header_seen) {
      if (tokens == kHeader) header_seen = true;
      continue;  // preamble lines before the header are ignored
    }
    if (tokens.size() != kHeader.size()) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(kHeader.size()) + " columns, got " +
                       std::to_string(tokens.size()));
    }
    HmdRow row;
    std::size_t pos = 0;
    try {
      row.year = std::stoi(tokens[0], &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != tokens[0].size()) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": bad year '" + tokens[0] + "'");
    }
    row.age_label = tokens[1];
    row.mx = parse_field(tokens[2], origin, line_no);
    std::optional<double> qx = parse_field(tokens[3], origin, line_no);
    row.ax = parse_field(tokens[4], origin, line_no);
    row.lx = parse_field(tokens[5], origin, line_no);
    std::optional<double> dx = parse_field(tokens[6], origin, line_no);
    row.Lx = parse_field(tokens[7], origin, line_no);
    row.Tx = parse_field(tokens[8], origin, line_no);
    row.ex = parse_field(tokens[9], origin, line_no);
    if (!qx) {
      throw ParseError(origin + ": missing qx for year " + std::to_string(row.year) +
                       " age " + row.age_label);
    }
    if (!dx) {
      throw ParseError(origin + ": missing dx for year " + std::to_string(row.year) +
                       " age " + row.age_label);
    }
    row.qx = *qx;
    row.dx = *dx;
    rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw ParseError(origin + ": no 'Year Age mx qx ax lx dx Lx Tx ex' header found");
  }
  if (rows.empty()) throw ParseError(origin + ": no data rows");

  std::map<int, std::vector<const HmdRow*>> by_year;
  for (const HmdRow& row : rows) by_year[row.year].push_back(&row);

  std::vector<int> years;
  for (const auto& [year, _] : by_year) years.push_back(year);
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] != years[i - 1] + 1) {
      throw ParseError(origin + ": year gap at " + std::to_string(years[i - 1] + 1));
    }
  }

  std::vector<std::string> labels;
  for (const HmdRow* row : by_year.begin()->second) labels.push_back(row->age_label);
  AgeGrid grid = AgeGrid::from_labels(labels);
  for (const auto& [year, year_rows] : by_year) {
    if (year_rows.size() != labels.size()) {
      throw ParseError(origin + ": year " + std::to_string(year) + " has " +
                       std::to_string(year_rows.size()) + " ages, expected " +
                       std::to_string(labels.size()) + " (missing age?)");
    }
    for (std::size_t a = 0; a < labels.size(); ++a) {
      if (year_rows[a]->age_label != labels[a]) {
        throw ParseError(origin + ": year " + std::to_string(year) + " missing age " +
                         labels[a]);
      }
    }
  }

  Eigen::MatrixXd qx_values(years.size(), labels.size());
  Eigen::MatrixXd dx_values(years.size(), labels.size());
  for (std::size_t t = 0; t < years.size(); ++t) {
    const auto& year_rows = by_year.at(years[t]);
    for (std::size_t a = 0; a < labels.size(); ++a) {
      qx_values(t, a) = year_rows[a]->qx;
      dx_values(t, a) = year_rows[a]->dx;
    }
  }

  HmdTable table{std::move(rows),
                 QxSeries{grid, years, sex, std::move(qx_values)},
                 LifeTableSeries(grid, years, sex, std::move(dx_values), radix)};
  table.qx.validate();
  return table;
}

HmdTable read_hmd_lifetable(const std::string& path, Sex sex, double radix) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_hmd_lifetable(in, sex, radix, path);
}

void write_hmd_lifetable(std::ostream& out, const std::vector<HmdRow>& rows,
                         const std::string& title) {
  if (!title.empty()) out << title << "\n\n";
  out << "Year  Age     mx       qx      ax      lx      dx      Lx        Tx     ex\n";
  for (const HmdRow& row : rows) {
    out << row.year << "  ";
    std::string label = row.age_label;
    label.resize(std::max<std::size_t>(label.size(), 4), ' ');
    out << label << "  " << fmt_opt(row.mx, 5) << "  " << fmt(row.qx, 5) << "  "
        << fmt_opt(row.ax, 2) << "  " << fmt_opt(row.lx, 0) << "  " << fmt(row.dx, 0)
        << "  " << fmt_opt(row.Lx, 0) << "  " << fmt_opt(row.Tx, 0) << "  "
        << fmt_opt(row.ex, 2) << "\n";
  }
}

void write_hmd_lifetable(const std::string& path, const std::vector<HmdRow>& rows,
                         const std::string& title) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_hmd_lifetable(out, rows, title);
}

std::vector<HmdRow> make_hmd_rows(const QxSeries& qx, double radix) {
  QxSeries checked = qx;
  checked.validate();
  std::vector<HmdRow> rows;
  const int A = checked.n_ages();
  for (int t = 0; t < checked.n_years(); ++t) {
    std::vector<double> l(A), d(A), L(A), ax(A);
    double survivors = radix;
    for (int a = 0; a < A; ++a) {
      double q = checked.values(t, a);
      l[a] = survivors;
      d[a] = survivors * q;
      survivors -= d[a];
      ax[a] = (a == 0) ? 0.14 : 0.5;
      L[a] = (a == A - 1) ? ax[a] * d[a] : l[a] - (1.0 - ax[a]) * d[a];
    }
    double T = 0.0;
    std::vector<double> Tx(A);
    for (int a = A - 1; a >= 0; --a) {
      T += L[a];
      Tx[a] = T;
    }
    for (int a = 0; a < A; ++a) {
      HmdRow row;
      row.year = checked.years[t];
      row.age_label = checked.grid.labels()[a];
      row.qx = checked.values(t, a);
      row.ax = ax[a];
      row.lx = l[a];
      row.dx = d[a];
      row.Lx = L[a];
      row.Tx = Tx[a];
      row.mx = L[a] > 0.0 ? d[a] / L[a] : 0.0;
      row.ex = l[a] > 0.0 ? Tx[a] / l[a] : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_series_csv(std::ostream& out, const std::vector<std::string>& labels,
                      const std::vector<int>& years, const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(labels.size()) != values.cols() ||
      static_cast<Eigen::Index>(years.size()) != values.rows()) {
    throw std::invalid_argument("csv export shape mismatch");
  }
  out << "year,age,value\n";
  char buf[64];
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    for (Eigen::Index a = 0; a < values.cols(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.10g", values(t, a));
      out << years[t] << ',' << labels[a] << ',' << buf << '\n';
    }
  }
}

}  // namespace lifecast
