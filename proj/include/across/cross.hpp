#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace across {

// One 0/1 row: bit 1 at slot j means factor j contributes its big set D_j to
// the branch, bit 0 means it contributes the small set A_j.
using Row = std::vector<std::uint8_t>;

enum class Ordering { LT, EQ, GT };

// A validated row: length >= 2 and at least one bit set.
class BinaryIndex {
 public:
  explicit BinaryIndex(Row bits);

  const Row& bits() const { return bits_; }
  int size() const { return static_cast<int>(bits_.size()); }
  int weight() const;  // number of 1 bits
  std::string str() const;

  bool operator==(const BinaryIndex&) const = default;

 private:
  Row bits_;
};

// d_slots / a_slots are 1-based factor indices, each increasing.
struct FactorSplit {
  std::vector<int> d_slots;
  std::vector<int> a_slots;
  bool operator==(const FactorSplit&) const = default;
};

// Point abstraction: in_a[j] is true when coordinate j+1 lies in A_{j+1}.
struct PointFlags {
  std::vector<bool> in_a;
};

Ordering lex_compare(const BinaryIndex& a, const BinaryIndex& b);

// True iff a_j <= b_j for every slot, i.e. branch(a) is contained in branch(b).
bool dominates(const BinaryIndex& a, const BinaryIndex& b);

FactorSplit split(const BinaryIndex& a);

// Defining matrix of a cross-like union of products. Rows are pairwise
// distinct and kept sorted ascending lexicographically.
class CrossMatrix {
 public:
  // Sorts, deduplicates, and validates; throws on width < 2, zero rows,
  // or unequal lengths. Duplicate rows add nothing to a union of branches,
  // so they collapse silently.
  static CrossMatrix from_rows(std::vector<Row> rows);

  // Text format: one row of '0'/'1' per line; blank lines and '#' comments
  // ignored; all rows equal length.
  static CrossMatrix parse_text(const std::string& text);

  int width() const { return width_; }
  int row_count() const { return static_cast<int>(rows_.size()); }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(int i) const { return rows_[i]; }

  std::string str() const;  // one row per line

  bool operator==(const CrossMatrix&) const = default;
  bool operator<(const CrossMatrix& o) const;  // lexicographic on row lists

 private:
  CrossMatrix(std::vector<Row> rows, int width) : rows_(std::move(rows)), width_(width) {}
  std::vector<Row> rows_;
  int width_ = 0;
};

enum class CrossKind { FullProduct, ClassicalCross, NKCross, TwoFoldGrouped, General };

struct Classification {
  CrossKind kind;
  int k = 0;                       // NKCross parameter (1 for ClassicalCross)
  std::optional<Row> alpha;       // TwoFoldGrouped: the lex-smaller defining row
  std::string tag() const;         // short text like "nk(2)", "general"
};

// Drops every row dominated by another row; the union of branches is
// unchanged and the result is an antichain.
CrossMatrix reduce(const CrossMatrix& m);

bool is_reduced(const CrossMatrix& m);

// Requires a reduced matrix.
Classification classify(const CrossMatrix& m);

// All rows of width n with exactly k ones (the (n,k)-cross), 1 <= k <= n.
CrossMatrix layer_matrix(int n, int k);

// True iff every column has a 1 somewhere, i.e. the elementary cross
// (all weight-1 rows) is contained in the union of branches.
bool covers_x_n1(const CrossMatrix& m);

// 1-based indices of columns that are 1 in every row.
std::vector<int> full_columns(const CrossMatrix& m);

// True iff some row puts every flagged-out coordinate in its D slots:
// row alpha matches when in_a[j] holds for every j with alpha_j = 0.
bool contains_point(const CrossMatrix& m, const PointFlags& p);

struct CanonicalForm {
  CrossMatrix matrix;
  // perm[j] = source column (0-based) that target column j was taken from.
  std::vector<int> perm;
};

// Lexicographically minimal matrix over all column permutations, rows
// re-sorted after each permutation. Requires a reduced matrix.
CanonicalForm canonical_form(const CrossMatrix& m);

// Applies a column permutation (perm[j] = source column) and re-sorts rows.
CrossMatrix permute_columns(const CrossMatrix& m, const std::vector<int>& perm);

enum class Filter : unsigned {
  Antichain = 1u << 0,
  ColumnCovered = 1u << 1,
  NoFullColumn = 1u << 2,
  NotNK = 1u << 3,
  NotTwoFoldGrouped = 1u << 4,
};

using FilterSet = unsigned;

inline FilterSet operator|(Filter a, Filter b) {
  return static_cast<unsigned>(a) | static_cast<unsigned>(b);
}
inline FilterSet operator|(FilterSet a, Filter b) { return a | static_cast<unsigned>(b); }
inline bool has_filter(FilterSet s, Filter f) { return (s & static_cast<unsigned>(f)) != 0; }

// All canonical forms over {0,1}^n passing the filters, deduplicated up to
// column permutation and sorted. 2 <= n <= 4 enumerates every row subset;
// n = 5 requires the Antichain filter (the unrestricted space is ~2^31).
std::vector<CrossMatrix> enumerate_matrices(int n, FilterSet filters);

}  // namespace across
