#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "across/cross.hpp"
#include "across/envelope.hpp"
#include "across/errors.hpp"
#include "helpers.hpp"

using namespace across;
using testing::bi;
using testing::bits;
using testing::mat;

TEST_CASE("binary index validation") {
  CHECK_THROWS_AS(BinaryIndex(bits("1")), DimensionError);
  CHECK_THROWS_AS(BinaryIndex(bits("000")), PreconditionError);
  CHECK(bi("0110").weight() == 2);
  CHECK(bi("0110").str() == "0110");
}

TEST_CASE("lex_compare") {
  CHECK(lex_compare(bi("011"), bi("100")) == Ordering::LT);
  CHECK(lex_compare(bi("011"), bi("011")) == Ordering::EQ);
  CHECK(lex_compare(bi("100"), bi("011")) == Ordering::GT);
  // Q5 rows listed ascending.
  CHECK(lex_compare(bi("0111"), bi("1001")) == Ordering::LT);
  CHECK(lex_compare(bi("1001"), bi("1100")) == Ordering::LT);
  CHECK_THROWS_AS(lex_compare(bi("01"), bi("011")), DimensionError);
}

TEST_CASE("dominates") {
  CHECK(dominates(bi("001"), bi("011")));
  CHECK_FALSE(dominates(bi("011"), bi("100")));
  CHECK(dominates(bi("11"), bi("11")));
  CHECK_THROWS_AS(dominates(bi("01"), bi("011")), DimensionError);
}

TEST_CASE("split") {
  CHECK(split(bi("0110")) == FactorSplit{{2, 3}, {1, 4}});
  CHECK(split(bi("11")) == FactorSplit{{1, 2}, {}});
  CHECK(split(bi("0001")) == FactorSplit{{4}, {1, 2, 3}});
}

TEST_CASE("matrix construction and text format") {
  CHECK(mat({"01", "01"}) == mat({"01"}));                 // duplicates collapse
  CHECK_THROWS_AS(mat({"01", "011"}), DimensionError);     // ragged
  CHECK_THROWS_AS(mat({"1"}), DimensionError);             // width < 2
  CHECK_THROWS_AS(mat({"00"}), PreconditionError);         // zero row
  const CrossMatrix m = mat({"100", "011"});
  CHECK(m.row(0) == bits("011"));  // rows kept lex-sorted
  CHECK(m.str() == "011\n100\n");

  const CrossMatrix p = CrossMatrix::parse_text("# comment\n011\n\n100\n");
  CHECK(p == m);
  CHECK(CrossMatrix::parse_text(p.str()) == p);
  CHECK_THROWS_AS(CrossMatrix::parse_text("01x\n"), ParseError);
  CHECK_THROWS_AS(CrossMatrix::parse_text("# only comments\n"), ParseError);
}

TEST_CASE("reduce examples") {
  CHECK(reduce(mat({"001", "011"})) == mat({"011"}));
  CHECK(reduce(mat({"0011", "0101", "1001"})) == mat({"0011", "0101", "1001"}));
  CHECK(reduce(mat({"01", "10", "11"})) == mat({"11"}));
  CHECK(is_reduced(mat({"01", "10"})));
  CHECK_FALSE(is_reduced(mat({"01", "11"})));
}

TEST_CASE("classify examples") {
  CHECK(classify(mat({"011", "101", "110"})).kind == CrossKind::NKCross);
  CHECK(classify(mat({"011", "101", "110"})).k == 2);
  CHECK(classify(mat({"011", "101", "110"})).tag() == "nk(2)");

  const Classification tf = classify(mat({"011", "100"}));
  CHECK(tf.kind == CrossKind::TwoFoldGrouped);
  CHECK(tf.alpha == bits("011"));
  CHECK(tf.tag() == "two-fold(011)");

  CHECK(classify(mat({"0011", "0110", "1001", "1100"})).kind == CrossKind::General);
  CHECK(classify(mat({"11"})).kind == CrossKind::FullProduct);
  CHECK(classify(mat({"01", "10"})).kind == CrossKind::ClassicalCross);
  CHECK_THROWS_AS(classify(mat({"001", "011"})), PreconditionError);
}

TEST_CASE("covers_x_n1 examples") {
  CHECK_FALSE(covers_x_n1(mat({"001", "100"})));
  CHECK(covers_x_n1(mat({"01", "10"})));
  CHECK(covers_x_n1(mat({"0111", "1001", "1010", "1100"})));
}

TEST_CASE("full_columns examples") {
  CHECK(full_columns(mat({"011", "101"})) == std::vector<int>{3});
  CHECK(full_columns(mat({"11"})) == std::vector<int>{1, 2});
  CHECK(full_columns(mat({"01", "10"})).empty());
}

TEST_CASE("contains_point examples") {
  const CrossMatrix q4 = mat({"0011", "0110", "1001", "1100"});
  CHECK(contains_point(q4, PointFlags{{true, false, false, true}}));
  CHECK_FALSE(contains_point(q4, PointFlags{{false, false, false, false}}));
  CHECK(contains_point(q4, PointFlags{{true, true, true, true}}));
  CHECK_THROWS_AS(contains_point(q4, PointFlags{{true, false}}), DimensionError);
}

TEST_CASE("canonical_form examples") {
  const CanonicalForm f = canonical_form(mat({"10"}));
  CHECK(f.matrix == mat({"01"}));
  CHECK(f.perm == std::vector<int>{1, 0});

  const CrossMatrix q1 = mat({"0001", "0110", "1000"});
  const CrossMatrix shuffled = mat({"0110", "0001", "1000"});  // same rows re-listed
  CHECK(canonical_form(shuffled).matrix == canonical_form(q1).matrix);
}

TEST_CASE("permute_columns round trip") {
  const CrossMatrix q1 = mat({"0001", "0110", "1000"});
  const std::vector<int> sigma{2, 0, 3, 1};
  const CrossMatrix moved = permute_columns(q1, sigma);
  CHECK(moved != q1);
  CHECK(canonical_form(moved).matrix == canonical_form(q1).matrix);
}

TEST_CASE("enumerate examples") {
  CHECK(enumerate_matrices(2, Filter::Antichain | Filter::ColumnCovered | Filter::NotNK).empty());
  CHECK(enumerate_matrices(3, Filter::Antichain | Filter::ColumnCovered | Filter::NotNK |
                                  Filter::NoFullColumn | Filter::NotTwoFoldGrouped)
            .empty());

  const auto out = enumerate_matrices(
      4, Filter::Antichain | Filter::ColumnCovered | Filter::NotNK | Filter::NoFullColumn);
  std::set<std::string> canon;
  for (const auto& m : out) canon.insert(m.str());
  for (const auto& c : nine_cases())
    CHECK(canon.count(canonical_form(c.matrix).matrix.str()) == 1);

  CHECK_THROWS_AS(enumerate_matrices(1, 0u), SizeError);
  CHECK_THROWS_AS(enumerate_matrices(6, 0u), SizeError);
  // Unfiltered n=5 would be astronomically large; the antichain filter is required.
  CHECK_THROWS_AS(enumerate_matrices(5, static_cast<FilterSet>(Filter::ColumnCovered)), SizeError);
}

TEST_CASE("invariant: reduce is idempotent") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const CrossMatrix m = testing::rand_matrix(rng, 2 + static_cast<int>(rng() % 4), 8);
    const CrossMatrix r = reduce(m);
    CHECK(reduce(r) == r);
  }
}

TEST_CASE("invariant: reduce yields an antichain and preserves membership") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 4);  // up to 5 factors
    const CrossMatrix m = testing::rand_matrix(rng, n, 10);
    const CrossMatrix r = reduce(m);
    CHECK(is_reduced(r));
    // Exhaustive over all 2^n flag vectors.
    for (unsigned f = 0; f < (1u << n); ++f) {
      PointFlags p;
      for (int j = 0; j < n; ++j) p.in_a.push_back((f >> j) & 1);
      CHECK(contains_point(m, p) == contains_point(r, p));
    }
  }
}

TEST_CASE("invariant: canonical_form constant on column-permutation orbits") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const CrossMatrix m = reduce(testing::rand_matrix(rng, n, 8));
    std::vector<int> sigma(n);
    for (int j = 0; j < n; ++j) sigma[j] = j;
    for (int j = n - 1; j > 0; --j) std::swap(sigma[j], sigma[rng() % (j + 1)]);
    const CrossMatrix moved = permute_columns(m, sigma);
    CHECK(canonical_form(moved).matrix == canonical_form(m).matrix);
  }
}

TEST_CASE("invariant: covers_x_n1 is the per-column one check") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const CrossMatrix m = testing::rand_matrix(rng, n, 8);
    bool expect = true;
    for (int j = 0; j < n; ++j) {
      bool seen = false;
      for (const Row& r : m.rows()) seen = seen || r[j];
      expect = expect && seen;
    }
    CHECK(covers_x_n1(m) == expect);
  }
}

TEST_CASE("invariant: layer matrices classify to their parameter") {
  for (int n = 2; n <= 5; ++n)
    for (int k = 1; k <= n; ++k) {
      const Classification c = classify(layer_matrix(n, k));
      CHECK(c.k == k);
      if (k == n)
        CHECK(c.kind == CrossKind::FullProduct);
      else if (k == 1)
        CHECK(c.kind == CrossKind::ClassicalCross);
      else
        CHECK(c.kind == CrossKind::NKCross);
    }
}

TEST_CASE("canonical_form permutation maps source columns") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const CrossMatrix m = reduce(testing::rand_matrix(rng, 4, 6));
    const CanonicalForm f = canonical_form(m);
    CHECK(permute_columns(m, f.perm) == f.matrix);
  }
}
