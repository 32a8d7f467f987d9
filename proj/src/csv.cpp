#include "lssclt/csv.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lssclt/errors.hpp"
#include "parse_util.hpp"

namespace lssclt {

Eigen::MatrixXd read_csv_matrix(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    try {
      row = detail::parse_doubles(line);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
      }
    }
    if (rows == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                       " fields, found " + std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ParseError("line " + std::to_string(line_no) + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
    }
  }
  return m;
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_csv_matrix(in);
}

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += fmt::format("{:.17g}", m(i, j));
    }
    line += '\n';
    out << line;
  }
}

void write_csv_column(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << fmt::format("{:.17g}\n", v);
}

}  // namespace lssclt
