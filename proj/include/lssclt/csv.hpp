#pragma once

// Header-free numeric CSV: one matrix row per line, comma separated,
// decimal-point floats.

#include <filesystem>
#include <iosfwd>
#include <span>

#include <Eigen/Dense>

namespace lssclt {

/// Throws ParseError naming the offending line for ragged, empty or
/// non-numeric input.
Eigen::MatrixXd read_csv_matrix(std::istream& in);
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Values are written with 17 significant digits so they round-trip exactly.
void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_csv_column(std::ostream& out, std::span<const double> values);

}  // namespace lssclt
