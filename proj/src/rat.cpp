#include "across/rat.hpp"

#include <cstdlib>
#include <numeric>

#include "across/errors.hpp"

namespace across {

namespace {

using I128 = __int128;

std::int64_t narrow(I128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw OverflowError("rational out of 64-bit range");
  return static_cast<std::int64_t>(v);
}

I128 gcd128(I128 a, I128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    I128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rat normalized(I128 n, I128 d) {
  if (d == 0) throw OverflowError("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  I128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rat r;
  r.num = narrow(n);
  r.den = narrow(d);
  return r;
}

}  // namespace

Rat::Rat(std::int64_t n, std::int64_t d) { *this = normalized(n, d); }

Rat Rat::operator+(const Rat& o) const {
  return normalized(I128(num) * o.den + I128(o.num) * den, I128(den) * o.den);
}

Rat Rat::operator-(const Rat& o) const {
  return normalized(I128(num) * o.den - I128(o.num) * den, I128(den) * o.den);
}

Rat Rat::operator*(const Rat& o) const {
  return normalized(I128(num) * o.num, I128(den) * o.den);
}

Rat Rat::operator/(const Rat& o) const {
  if (o.num == 0) throw OverflowError("division by zero rational");
  return normalized(I128(num) * o.den, I128(den) * o.num);
}

std::strong_ordering Rat::operator<=>(const Rat& o) const {
  I128 lhs = I128(num) * o.den;
  I128 rhs = I128(o.num) * den;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rat::str() const {
  std::string s = std::to_string(num);
  if (den != 1) s += "/" + std::to_string(den);
  return s;
}

Rat Rat::parse(const std::string& text) {
  std::size_t slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(text));
    return Rat(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw ParseError("bad rational literal: " + text);
  }
}

}  // namespace across
