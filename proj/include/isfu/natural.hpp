// Arbitrary-precision naturals used as states of functional units.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace isfu {

using Natural = boost::multiprecision::cpp_int;

inline std::string to_string(const Natural& n) { return n.str(); }

inline Natural parse_natural(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty natural");
  for (char c : s)
    if (c < '0' || c > '9')
      throw std::invalid_argument("bad natural '" + std::string(s) + "'");
  return Natural(std::string(s));
}

/// Largest y with p^y dividing x. For x = 0 every power divides; 0 is
/// returned so that the operation stays total.
inline Natural multiplicity(const Natural& x, unsigned p) {
  if (x == 0) return 0;
  Natural rest = x;
  Natural y = 0;
  while (rest % p == 0) {
    rest /= p;
    ++y;
  }
  return y;
}

/// Exponents above this bound would need gigabytes of digits.
inline constexpr std::uint64_t kMaxShift = std::uint64_t{1} << 32;

inline Natural pow2(const Natural& x) {
  if (x >= kMaxShift)
    throw std::length_error("2^x with x = " + x.str() + " is not representable");
  Natural r = 1;
  r <<= static_cast<std::uint64_t>(x);
  return r;
}

}  // namespace isfu
