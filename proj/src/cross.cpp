#include "across/cross.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "across/errors.hpp"

namespace across {

namespace {

int row_weight(const Row& r) {
  return static_cast<int>(std::count(r.begin(), r.end(), std::uint8_t{1}));
}

bool row_le(const Row& a, const Row& b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

BinaryIndex::BinaryIndex(Row bits) : bits_(std::move(bits)) {
  if (bits_.size() < 2) throw DimensionError("index length must be at least 2");
  for (auto b : bits_)
    if (b > 1) throw PreconditionError("index entries must be 0 or 1");
  if (row_weight(bits_) == 0) throw PreconditionError("index must have at least one 1");
}

int BinaryIndex::weight() const { return row_weight(bits_); }

std::string BinaryIndex::str() const {
  std::string s;
  for (auto b : bits_) s += static_cast<char>('0' + b);
  return s;
}

Ordering lex_compare(const BinaryIndex& a, const BinaryIndex& b) {
  if (a.size() != b.size()) throw DimensionError("lex_compare: length mismatch");
  if (a.bits() < b.bits()) return Ordering::LT;
  if (b.bits() < a.bits()) return Ordering::GT;
  return Ordering::EQ;
}

bool dominates(const BinaryIndex& a, const BinaryIndex& b) {
  if (a.size() != b.size()) throw DimensionError("dominates: length mismatch");
  return row_le(a.bits(), b.bits());
}

FactorSplit split(const BinaryIndex& a) {
  FactorSplit s;
  for (int j = 0; j < a.size(); ++j) {
    if (a.bits()[j])
      s.d_slots.push_back(j + 1);
    else
      s.a_slots.push_back(j + 1);
  }
  return s;
}

CrossMatrix CrossMatrix::from_rows(std::vector<Row> rows) {
  if (rows.empty()) throw PreconditionError("matrix must have at least one row");
  const int width = static_cast<int>(rows[0].size());
  if (width < 2) throw DimensionError("matrix width must be at least 2");
  for (const Row& r : rows) {
    if (static_cast<int>(r.size()) != width) throw DimensionError("rows of unequal length");
    for (auto b : r)
      if (b > 1) throw PreconditionError("row entries must be 0 or 1");
    if (row_weight(r) == 0) throw PreconditionError("zero row rejected");
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return CrossMatrix(std::move(rows), width);
}

CrossMatrix CrossMatrix::parse_text(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    Row r;
    for (char c : line) {
      if (c == '0' || c == '1')
        r.push_back(static_cast<std::uint8_t>(c - '0'));
      else if (!std::isspace(static_cast<unsigned char>(c)))
        throw ParseError(std::string("unexpected character '") + c + "' in matrix text");
    }
    if (!r.empty()) rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("matrix text contains no rows");
  try {
    return from_rows(std::move(rows));
  } catch (const Error& e) {
    throw ParseError(std::string("invalid matrix: ") + e.what());
  }
}

std::string CrossMatrix::str() const {
  std::string out;
  for (const Row& r : rows_) {
    for (auto b : r) out += static_cast<char>('0' + b);
    out += '\n';
  }
  return out;
}

bool CrossMatrix::operator<(const CrossMatrix& o) const {
  return rows_ < o.rows_;
}

CrossMatrix reduce(const CrossMatrix& m) {
  std::vector<Row> kept;
  for (const Row& r : m.rows()) {
    bool dominated = false;
    for (const Row& s : m.rows()) {
      if (&r != &s && row_le(r, s)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(r);
  }
  return CrossMatrix::from_rows(std::move(kept));
}

bool is_reduced(const CrossMatrix& m) { return reduce(m) == m; }

namespace {

// Row-set equality with the full weight-k layer of {0,1}^n.
std::optional<int> nk_parameter(const CrossMatrix& m) {
  const int k = row_weight(m.row(0));
  for (const Row& r : m.rows())
    if (row_weight(r) != k) return std::nullopt;
  if (m.row_count() != binom(m.width(), k)) return std::nullopt;
  return k;
}

std::optional<Row> twofold_alpha(const CrossMatrix& m) {
  if (m.row_count() != 2) return std::nullopt;
  for (int j = 0; j < m.width(); ++j)
    if (m.row(0)[j] == m.row(1)[j]) return std::nullopt;
  return m.row(0);
}

}  // namespace

CrossMatrix layer_matrix(int n, int k) {
  if (n < 2 || k < 1 || k > n) throw PreconditionError("layer_matrix: need 1 <= k <= n, n >= 2");
  std::vector<Row> rows;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    Row r(n);
    for (int j = 0; j < n; ++j) r[j] = (mask >> j) & 1u;
    rows.push_back(std::move(r));
  }
  return CrossMatrix::from_rows(std::move(rows));
}

Classification classify(const CrossMatrix& m) {
  if (!is_reduced(m)) throw PreconditionError("classify requires a reduced matrix");
  Classification c;
  if (auto k = nk_parameter(m)) {
    c.k = *k;
    if (*k == m.width())
      c.kind = CrossKind::FullProduct;
    else if (*k == 1)
      c.kind = CrossKind::ClassicalCross;
    else
      c.kind = CrossKind::NKCross;
    return c;
  }
  if (auto alpha = twofold_alpha(m)) {
    c.kind = CrossKind::TwoFoldGrouped;
    c.alpha = *alpha;
    return c;
  }
  c.kind = CrossKind::General;
  return c;
}

std::string Classification::tag() const {
  switch (kind) {
    case CrossKind::FullProduct:
      return "full-product";
    case CrossKind::ClassicalCross:
      return "classical";
    case CrossKind::NKCross:
      return "nk(" + std::to_string(k) + ")";
    case CrossKind::TwoFoldGrouped: {
      std::string s = "two-fold(";
      for (auto b : *alpha) s += static_cast<char>('0' + b);
      return s + ")";
    }
    case CrossKind::General:
      return "general";
  }
  return "?";
}

bool covers_x_n1(const CrossMatrix& m) {
  for (int j = 0; j < m.width(); ++j) {
    bool hit = false;
    for (const Row& r : m.rows()) hit = hit || r[j] == 1;
    if (!hit) return false;
  }
  return true;
}

std::vector<int> full_columns(const CrossMatrix& m) {
  std::vector<int> cols;
  for (int j = 0; j < m.width(); ++j) {
    bool all = true;
    for (const Row& r : m.rows()) all = all && r[j] == 1;
    if (all) cols.push_back(j + 1);
  }
  return cols;
}

bool contains_point(const CrossMatrix& m, const PointFlags& p) {
  if (static_cast<int>(p.in_a.size()) != m.width())
    throw DimensionError("contains_point: flag length mismatch");
  for (const Row& r : m.rows()) {
    bool match = true;
    for (int j = 0; j < m.width(); ++j)
      if (r[j] == 0 && !p.in_a[j]) {
        match = false;
        break;
      }
    if (match) return true;
  }
  return false;
}

CrossMatrix permute_columns(const CrossMatrix& m, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != m.width())
    throw DimensionError("permutation length mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (int s : perm) {
    if (s < 0 || s >= m.width() || seen[s]) throw PreconditionError("not a permutation");
    seen[s] = true;
  }
  std::vector<Row> rows;
  rows.reserve(m.row_count());
  for (const Row& r : m.rows()) {
    Row q(r.size());
    for (std::size_t j = 0; j < perm.size(); ++j) q[j] = r[perm[j]];
    rows.push_back(std::move(q));
  }
  return CrossMatrix::from_rows(std::move(rows));
}

CanonicalForm canonical_form(const CrossMatrix& m) {
  std::vector<int> perm(m.width());
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<CrossMatrix> best;
  std::vector<int> best_perm = perm;
  std::vector<int> p = perm;
  do {
    CrossMatrix cand = permute_columns(m, p);
    if (!best || cand < *best) {
      best = cand;
      best_perm = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return CanonicalForm{*best, best_perm};
}

namespace {

Row mask_to_row(unsigned mask, int n) {
  Row r(n);
  for (int j = 0; j < n; ++j) r[j] = (mask >> j) & 1u;
  return r;
}

bool passes_filters(const CrossMatrix& m, FilterSet filters) {
  if (has_filter(filters, Filter::Antichain) && !is_reduced(m)) return false;
  if (has_filter(filters, Filter::ColumnCovered) && !covers_x_n1(m)) return false;
  if (has_filter(filters, Filter::NoFullColumn) && !full_columns(m).empty()) return false;
  if (has_filter(filters, Filter::NotNK) && nk_parameter(m)) return false;
  if (has_filter(filters, Filter::NotTwoFoldGrouped) && twofold_alpha(m)) return false;
  return true;
}

}  // namespace

std::vector<CrossMatrix> enumerate_matrices(int n, FilterSet filters) {
  if (n < 2 || n > 5) throw SizeError("enumeration supports 2 <= n <= 5");
  std::set<CrossMatrix> out;
  auto consider = [&](const std::vector<unsigned>& masks) {
    std::vector<Row> rows;
    rows.reserve(masks.size());
    for (unsigned mk : masks) rows.push_back(mask_to_row(mk, n));
    CrossMatrix m = CrossMatrix::from_rows(std::move(rows));
    if (passes_filters(m, filters)) out.insert(canonical_form(m).matrix);
  };
  const unsigned top = (1u << n) - 1;
  if (n <= 4) {
    // Every nonempty subset of nonzero rows.
    for (unsigned long long sel = 1; sel < (1ull << top); ++sel) {
      std::vector<unsigned> masks;
      for (unsigned mk = 1; mk <= top; ++mk)
        if (sel >> (mk - 1) & 1ull) masks.push_back(mk);
      consider(masks);
    }
    return {out.begin(), out.end()};
  }
  // n = 5: the unrestricted subset space is ~2^31; only antichain
  // enumeration is supported there.
  if (!has_filter(filters, Filter::Antichain))
    throw SizeError("n = 5 enumeration requires the antichain filter");
  std::vector<unsigned> chosen;
  std::function<void(unsigned)> dfs = [&](unsigned next) {
    if (!chosen.empty()) consider(chosen);
    for (unsigned mk = next; mk <= top; ++mk) {
      bool ok = true;
      for (unsigned c : chosen) {
        if ((c & mk) == c || (c & mk) == mk) {  // comparable
          ok = false;
          break;
        }
      }
      if (ok) {
        chosen.push_back(mk);
        dfs(mk + 1);
        chosen.pop_back();
      }
    }
  };
  dfs(1);
  return {out.begin(), out.end()};
}

}  // namespace across
