#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geollm {

// Shortest decimal string that round-trips to the same double.
std::string format_shortest(double value);

// Up to `significant` significant digits, trailing zeros trimmed
// (199.68899999999996 -> "199.689", 35.0 -> "35").
std::string format_compact(double value, int significant = 10);

// Shortest round-trip form, always carrying at least one decimal ("50.0").
std::string format_with_decimal(double value);

// Strict full-string parse; surrounding whitespace allowed.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
bool starts_with(std::string_view text, std::string_view prefix);

std::size_t utf8_length(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace geollm
