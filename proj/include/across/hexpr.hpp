#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "across/rat.hpp"

namespace across {

// Immutable expression tree over variables h1..hN with exact rational
// constants. Every tree built from these constructors is piecewise-linear,
// convex, and componentwise nondecreasing on [0,1]^N (Scale coefficients are
// required nonnegative). A set description is {h in [0,1)^N : expr(h) < 1}.
class HExpr {
 public:
  enum class Kind { Var, Const, Scale, Sum, Max };

  static HExpr var(int index);                  // index >= 1
  static HExpr constant(Rat q);
  static HExpr scale(Rat c, HExpr child);       // c >= 0; scale(1,x) collapses to x
  static HExpr sum(std::vector<HExpr> kids);    // >= 1 child; singleton collapses
  static HExpr max_of(std::vector<HExpr> kids); // >= 1 child; singleton collapses

  Kind kind() const { return node_->kind; }
  int var_index() const { return node_->var; }      // Kind::Var
  const Rat& constant_value() const { return node_->q; }  // Kind::Const
  const Rat& scale_coeff() const { return node_->q; }     // Kind::Scale
  const std::vector<HExpr>& children() const { return node_->kids; }

  int max_var() const;  // largest variable index, 0 if none

  // Exact evaluation; every h[j] must lie in [0,1].
  Rat eval(const std::vector<Rat>& h) const;
  // Double-precision evaluation without domain checks (numeric layer).
  double eval_d(const std::vector<double>& h) const;

  // Structurally guaranteed >= 0 on [0,1]^N (sufficient condition).
  bool is_nonneg() const;

  bool structurally_equal(const HExpr& o) const;

  // Canonical prefix text, e.g. sum(h1,scale(1/2,sum(h2,h3,h4,-1))).
  std::string str() const;
  static HExpr parse(const std::string& text);

  // Replaces Var(from) by the given expression, for each map entry.
  HExpr substitute_vars(const std::vector<std::pair<int, HExpr>>& map) const;

 private:
  struct Node {
    Kind kind;
    int var = 0;
    Rat q;
    std::vector<HExpr> kids;
  };
  explicit HExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Max-combine used by the symbolic engine: flattens nested Max arguments,
// drops nonpositive constants when another operand is provably nonnegative,
// and deduplicates structurally equal operands.
HExpr max_combine(std::vector<HExpr> parts);

// Exact fixed-point compilation of an expression for fast lattice scans:
// with inputs h_j = num_j / in_den, eval_num returns expr * denom() exactly.
class CompiledExpr {
 public:
  CompiledExpr(const HExpr& e, std::int64_t in_den, int n_vars);
  std::int64_t denom() const { return denom_; }
  std::int64_t eval_num(const std::int64_t* h_num) const;

 private:
  enum class OpKind : std::uint8_t { PushVar, PushConst, Scale, Sum, Max };
  struct Op {
    OpKind kind;
    int arg = 0;          // var index / operand count
    std::int64_t c0 = 0;  // PushVar: D / in_den; PushConst: value * D; Scale: p
    std::int64_t c1 = 1;  // Scale: q
  };
  std::vector<Op> ops_;
  std::int64_t denom_ = 1;
  mutable std::vector<std::int64_t> stack_;
};

struct DescEqualParams {
  Rat step = Rat(1, 64);      // lattice step, must be 1/q
  int n_random = 10000;       // seeded random samples after the lattice
  std::uint64_t seed = 0;
};

struct DescEqualResult {
  bool equal = true;
  std::optional<std::vector<Rat>> witness;  // first disagreeing point (lattice-first)
  std::int64_t lattice_points = 0;          // points covered by the exact scan
  int random_samples = 0;
  Rat step;
  std::uint64_t seed = 0;
};

// Compares {a<1} and {b<1} over [0,1)^n: exact membership on the full step
// lattice (monotonicity makes a per-line boundary scan exhaustive), then
// n_random seeded rational samples. The reported witness is deterministic:
// lattice points in lexicographic order come first.
DescEqualResult desc_equal(const HExpr& a, const HExpr& b, int n, DescEqualParams params = {});

// One-sided variant: verifies {a<1} is contained in {b<1} on the lattice;
// returns a lattice point in {a<1} but outside {b<1} if containment fails.
std::optional<std::vector<Rat>> desc_subset_violation(const HExpr& a, const HExpr& b, int n,
                                                      Rat step = Rat(1, 16));

}  // namespace across
