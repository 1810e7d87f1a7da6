#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gani {

// Shortest-safe round-trip form: 17 significant digits, general notation.
std::string format_double(double value);

// Splits on `sep` without trimming.
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

// Strict full-field parses; throw DatasetError naming `what` on failure.
double parse_double(std::string_view field, std::string_view what);
unsigned long long parse_unsigned(std::string_view field, std::string_view what);
long long parse_signed(std::string_view field, std::string_view what);

}  // namespace gani
