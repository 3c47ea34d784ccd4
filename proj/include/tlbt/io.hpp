#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tlbt {

/// "%.17g": enough digits that parsing the text returns the same double.
std::string format_double(double v);

/// Writes `contents` to a temporary sibling of `path`, then renames it over
/// `path`. Parent directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace tlbt
