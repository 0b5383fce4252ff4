#ifndef PATHFORGE_FORMAT_HPP
#define PATHFORGE_FORMAT_HPP

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace pathforge {

/// Shortest round-trip decimal form of v, always carrying a decimal point or
/// exponent (137.5945426777758, 50.0, 1e-07).
inline std::string repr_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace pathforge

#endif  // PATHFORGE_FORMAT_HPP
