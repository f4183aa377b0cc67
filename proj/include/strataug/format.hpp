#pragma once

#include <charconv>
#include <string>

namespace strataug {

// Locale-independent numeric formatting (decimal point, no grouping).

inline std::string format_significant(double value, int digits) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, digits);
  return std::string(buffer, result.ptr);
}

inline std::string format_fixed(double value, int decimals) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed, decimals);
  return std::string(buffer, result.ptr);
}

}  // namespace strataug
