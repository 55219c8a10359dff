#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace angular {

/// Shortest decimal string that parses back to the same double. NaN and
/// infinities print as "nan", "inf", "-inf".
std::string format_double(double x);

/// Strict parse of a full string as a double.
double parse_double(std::string_view text);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace angular
