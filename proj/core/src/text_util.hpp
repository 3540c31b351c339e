#ifndef HANDMOTION_SRC_TEXT_UTIL_HPP_
#define HANDMOTION_SRC_TEXT_UTIL_HPP_

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace handmotion::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Whitespace-separated floats. Returns false on any malformed token.
inline bool parse_doubles(std::string_view line, std::vector<double>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (true) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == ',')) ++p;
    if (p >= end) return true;
    if (*p == '+') ++p;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || next == p) return false;
    if (next < end && !(*next == ' ' || *next == '\t' || *next == '\r' ||
                        *next == ',')) {
      return false;
    }
    out.push_back(v);
    p = next;
  }
}

// Shortest decimal text that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_float(float v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace handmotion::detail

#endif  // HANDMOTION_SRC_TEXT_UTIL_HPP_
