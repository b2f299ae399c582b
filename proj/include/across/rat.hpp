#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace across {

// Exact rational number on 64-bit words. Invariant: den > 0 and
// gcd(|num|, den) == 1. All intermediates go through 128-bit arithmetic;
// results that do not fit 64 bits after normalization throw OverflowError.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rat() = default;
  constexpr Rat(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rat(std::int64_t n, std::int64_t d);

  bool is_zero() const { return num == 0; }
  bool is_negative() const { return num < 0; }
  bool is_integer() const { return den == 1; }

  Rat operator-() const { return Rat(-num, den); }
  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;
  Rat& operator+=(const Rat& o) { return *this = *this + o; }

  bool operator==(const Rat&) const = default;
  std::strong_ordering operator<=>(const Rat& o) const;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  // "3", "-1", "5/7".
  std::string str() const;
  static Rat parse(const std::string& text);
};

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace across
