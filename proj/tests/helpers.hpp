#pragma once

// Small shared helpers for the test suite.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "across/cross.hpp"
#include "across/rat.hpp"

namespace across::testing {

inline Row bits(const std::string& s) {
  Row r;
  r.reserve(s.size());
  for (char c : s) r.push_back(c == '1' ? 1 : 0);
  return r;
}

inline BinaryIndex bi(const std::string& s) { return BinaryIndex(bits(s)); }

inline CrossMatrix mat(const std::vector<std::string>& rows) {
  std::vector<Row> rs;
  rs.reserve(rows.size());
  for (const auto& s : rows) rs.push_back(bits(s));
  return CrossMatrix::from_rows(std::move(rs));
}

// Uniform rational in [0,1) with denominator 65536, from raw generator bits.
inline Rat rand_rat(std::mt19937_64& rng) {
  return Rat(static_cast<std::int64_t>(rng() >> 48), 65536);
}

inline std::vector<Rat> rand_point(std::mt19937_64& rng, int n) {
  std::vector<Rat> h(n);
  for (auto& v : h) v = rand_rat(rng);
  return h;
}

// Random valid matrix: 1..max_rows distinct nonzero rows of width n.
inline CrossMatrix rand_matrix(std::mt19937_64& rng, int n, int max_rows) {
  const std::uint64_t full = (1ull << n) - 1;
  while (true) {
    std::vector<Row> rows;
    const int want = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_rows));
    std::uint64_t seen = 0;
    for (int i = 0; i < want; ++i) {
      const std::uint64_t w = 1 + rng() % full;  // nonzero
      if (seen & (1ull << w)) continue;
      seen |= 1ull << w;
      Row r(n);
      for (int j = 0; j < n; ++j) r[j] = (w >> j) & 1;
      rows.push_back(std::move(r));
    }
    if (!rows.empty()) return CrossMatrix::from_rows(std::move(rows));
  }
}

}  // namespace across::testing
