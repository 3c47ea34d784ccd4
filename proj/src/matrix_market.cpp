#include "tlbt/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "tlbt/error.hpp"
#include "tlbt/io.hpp"

namespace tlbt {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

[[noreturn]] void parse_error(const std::string& source, long line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw Error(ErrorCode::Parse, os.str());
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if constexpr (std::is_floating_point_v<T>) {
    // strtod accepts forms (e.g. "1e+05", "inf") that from_chars may reject on older libstdc++.
    std::string tmp(tok);
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size();
  } else {
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
  }
}

}  // namespace

Matrix read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) parse_error(source, 1, "empty file");
  ++line_no;

  const auto header = split_ws(line);
  if (header.size() != 5 || lower(std::string(header[0])) != "%%matrixmarket" ||
      lower(std::string(header[1])) != "matrix") {
    parse_error(source, line_no, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  const std::string format = lower(std::string(header[2]));
  const std::string field = lower(std::string(header[3]));
  const std::string symmetry = lower(std::string(header[4]));
  if (format != "coordinate" && format != "array") {
    parse_error(source, line_no, "unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer" && field != "double") {
    parse_error(source, line_no, "unsupported field '" + field + "' (only real)");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    parse_error(source, line_no, "unsupported symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  // Skip comments and blank lines up to the size line.
  std::vector<std::string_view> sizes;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    sizes = split_ws(line);
    if (!sizes.empty()) break;
  }
  if (sizes.empty()) parse_error(source, line_no, "missing size line");

  long rows = 0, cols = 0, nnz = 0;
  if (format == "coordinate") {
    if (sizes.size() != 3 || !parse_number(sizes[0], rows) || !parse_number(sizes[1], cols) ||
        !parse_number(sizes[2], nnz)) {
      parse_error(source, line_no, "expected '<rows> <cols> <entries>'");
    }
  } else {
    if (sizes.size() != 2 || !parse_number(sizes[0], rows) || !parse_number(sizes[1], cols)) {
      parse_error(source, line_no, "expected '<rows> <cols>'");
    }
  }
  if (rows < 1 || cols < 1) parse_error(source, line_no, "dimensions must be positive");
  if (symmetric && rows != cols) parse_error(source, line_no, "symmetric matrix must be square");

  Matrix m = Matrix::Zero(rows, cols);
  auto next_data_line = [&](std::vector<std::string_view>& toks) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '%') continue;
      toks = split_ws(line);
      if (!toks.empty()) return true;
    }
    return false;
  };

  std::vector<std::string_view> toks;
  if (format == "coordinate") {
    for (long k = 0; k < nnz; ++k) {
      if (!next_data_line(toks)) {
        parse_error(source, line_no, "expected " + std::to_string(nnz) + " entries, found " +
                                         std::to_string(k));
      }
      long i = 0, j = 0;
      double v = 0.0;
      if (toks.size() != 3 || !parse_number(toks[0], i) || !parse_number(toks[1], j) ||
          !parse_number(toks[2], v)) {
        parse_error(source, line_no, "expected '<row> <col> <value>'");
      }
      if (i < 1 || i > rows || j < 1 || j > cols) parse_error(source, line_no, "index out of range");
      if (!std::isfinite(v)) parse_error(source, line_no, "non-finite value");
      if (symmetric && j > i) parse_error(source, line_no, "symmetric storage expects the lower triangle");
      m(i - 1, j - 1) = v;
      if (symmetric) m(j - 1, i - 1) = v;
    }
  } else {
    // Array format: column-major; symmetric storage lists the lower triangle.
    for (long j = 0; j < cols; ++j) {
      for (long i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(toks)) parse_error(source, line_no, "too few array entries");
        double v = 0.0;
        if (toks.size() != 1 || !parse_number(toks[0], v)) parse_error(source, line_no, "expected one value");
        if (!std::isfinite(v)) parse_error(source, line_no, "non-finite value");
        m(i, j) = v;
        if (symmetric) m(j, i) = v;
      }
    }
  }
  if (next_data_line(toks)) parse_error(source, line_no, "unexpected trailing data");
  return m;
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return read_matrix_market(in, path.string());
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << "\n";
  }
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m) {
  std::ostringstream os;
  write_matrix_market(os, m);
  write_file_atomic(path, os.str());
}

}  // namespace tlbt
