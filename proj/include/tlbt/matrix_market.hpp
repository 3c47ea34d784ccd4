#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "tlbt/linalg.hpp"

namespace tlbt {

/// Reads a real Matrix Market file, coordinate or array format, general or
/// symmetric storage, into a dense matrix. Symmetric storage is expanded.
/// Errors carry the 1-based line number of the offending line.
Matrix read_matrix_market(const std::filesystem::path& path);
Matrix read_matrix_market(std::istream& in, const std::string& source = "<stream>");

/// Writes the matrix in array (dense, column-major) format with 17
/// significant digits, so a read-back is bit-exact.
void write_matrix_market(const std::filesystem::path& path, const Matrix& m);
void write_matrix_market(std::ostream& out, const Matrix& m);

}  // namespace tlbt
