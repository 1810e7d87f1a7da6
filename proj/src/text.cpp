#include "gani/text.hpp"

#include <array>
#include <charconv>

#include "gani/error.hpp"

namespace gani {

std::string format_double(double value) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  return {buf.data(), res.ptr};
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::string_view what) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    throw DatasetError("cannot parse " + std::string(what) + " from '" +
                       std::string(field) + "'");
  }
  return value;
}

}  // namespace

double parse_double(std::string_view field, std::string_view what) {
  return parse_number<double>(field, what);
}

unsigned long long parse_unsigned(std::string_view field, std::string_view what) {
  return parse_number<unsigned long long>(field, what);
}

long long parse_signed(std::string_view field, std::string_view what) {
  return parse_number<long long>(field, what);
}

}  // namespace gani
