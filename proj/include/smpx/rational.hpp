#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "smpx/error.hpp"

namespace smpx {

using Rational = mpq_class;

// Accepts "[-]digits" or "[-]digits/digits" with a nonzero denominator.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorKind::ParseError,
                 "invalid rational '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
  const std::size_t num_begin = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == num_begin) throw fail();
  if (pos < text.size()) {
    if (text[pos] != '/') throw fail();
    const std::size_t den_begin = ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == den_begin || pos != text.size()) throw fail();
    if (text.find_first_not_of('0', den_begin) == std::string_view::npos) throw fail();
  }
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  Rational value(digits, 10);
  value.canonicalize();
  return value;
}

inline std::string to_string(const Rational& value) { return value.get_str(); }

inline Rational pow(const Rational& base, int exponent) {
  Rational result(1);
  Rational factor = base;
  if (exponent < 0) {
    if (base == 0) throw Error(ErrorKind::InvalidArgument, "zero to a negative power");
    factor = 1 / base;
    exponent = -exponent;
  }
  // Square-and-multiply.
  while (exponent > 0) {
    if (exponent & 1) result *= factor;
    factor *= factor;
    exponent >>= 1;
  }
  return result;
}

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

}  // namespace smpx
