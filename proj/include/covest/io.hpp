#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace covest::io {

/// Shortest decimal string that parses back to exactly the same double.
/// Locale-independent.
std::string format_double(double v);

/// Plain rectangular numeric CSV: no header, one row per line, comma
/// separated. Blank lines are ignored; ragged rows are an Io error.
Eigen::MatrixXd parse_csv_matrix(std::istream& in, const std::string& origin = "<stream>");
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& a);
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& a);

/// Writes `contents` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace covest::io
