#pragma once

#include <array>
#include <charconv>
#include <string>

namespace rheoflame {

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace rheoflame
