#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "across/cross.hpp"
#include "across/hexpr.hpp"

namespace across {

// Working view of a cross-like set over a subset of the ambient factors.
// `factors` holds the surviving 1-based ambient indices in ascending order;
// rows are indexed positionally against it. Unlike CrossMatrix, rows of
// weight 0 are allowed (a pure product of small sets arises transiently
// inside the recursion).
struct SubCross {
  std::vector<int> factors;
  std::vector<Row> rows;

  static SubCross of(const CrossMatrix& m);
  int width() const { return static_cast<int>(factors.size()); }
  std::string str() const;
  bool operator==(const SubCross&) const = default;
};

// Row dedup plus removal of rows dominated by another row.
SubCross reduce_sub(const SubCross& s);

// Closure form for `set` (a union of branches over the same factors) inside
// the envelope of `domain`, as an expression over the ambient variables.
// Returns nullopt when the rule database does not cover the pair. Both
// arguments are reduced internally. The forms come from the rule functions
// below and inherit their tightness notes.
std::optional<HExpr> close_relative_extremal(const SubCross& set, const SubCross& domain);

// Result of the recursive envelope builder. Closed(expr) stands for the set
// {h : expr(h) < 1}. Product splits off factors present in every branch.
// TwoFold records an unfinished pivot step: the envelope equals
// {E_domain < 1} intersected with {h_pivot + hstar(set, domain-envelope) < 1},
// with the inner extremal function left symbolic when closed_inner is empty.
class EnvelopeDescription {
 public:
  enum class Tag { Closed, Product, TwoFold };

  static EnvelopeDescription closed(HExpr e);
  static EnvelopeDescription product(std::vector<int> full_factors, EnvelopeDescription child);
  static EnvelopeDescription two_fold(int pivot, SubCross inner_cross, SubCross domain_cross,
                                      EnvelopeDescription domain_env,
                                      std::optional<HExpr> closed_inner);

  Tag tag() const { return tag_; }
  bool is_closed() const { return tag_ == Tag::Closed; }

  const HExpr& expr() const;                      // Tag::Closed
  const std::vector<int>& full_factors() const;   // Tag::Product
  const EnvelopeDescription& child() const;       // Tag::Product / TwoFold domain env
  int pivot() const;                              // Tag::TwoFold
  const SubCross& inner_cross() const;            // Tag::TwoFold
  const SubCross& domain_cross() const;           // Tag::TwoFold
  const std::optional<HExpr>& closed_inner() const;  // Tag::TwoFold

  // Single closed expression when the whole tree is expressible: Closed
  // nodes directly; Product nodes flatten their child (the split-off
  // variables are unconstrained); TwoFold nodes flatten when both the domain
  // envelope and the inner extremal function are closed.
  std::optional<HExpr> flatten() const;

  std::string str() const;

 private:
  EnvelopeDescription() = default;
  Tag tag_ = Tag::Closed;
  std::optional<HExpr> expr_;
  std::vector<int> full_factors_;
  std::shared_ptr<const EnvelopeDescription> child_;
  int pivot_ = 0;
  std::optional<SubCross> inner_cross_;
  std::optional<SubCross> domain_cross_;
  std::optional<HExpr> closed_inner_;
};

// Envelope description of the (n,k)-cross: {Scale(1/k, Sum h_j) < 1}.
HExpr nk_envelope(int n, int k);

// Closure form for a product of small sets (slots in a_slots) times big
// sets (slots in d_slots) inside the envelope of the (N,k)-cross over those
// N = |a|+|d| slots. Slot values are the ambient variable indices. Equals
// the relative extremal function when |d_slots| <= 1; otherwise it is an
// admissible lower bound of it.
HExpr rule_prop_center(std::vector<int> a_slots, std::vector<int> d_slots, int k);

// Closure form for the (n,k)-cross inside the (n,l)-envelope. Equals the
// relative extremal function when l == k+1; otherwise it is an admissible
// lower bound of it.
HExpr rule_env_in_env(int n, int k, int l);

// Relative extremal function of A x D inside the two-fold cross envelope
// over the two slots: the big-set coordinate drops out.
HExpr rule_claim_q6(int a_slot, int d_slot);

// Builds the envelope description. Requires a reduced matrix whose columns
// are all covered (otherwise PathologicalCrossError).
EnvelopeDescription build_envelope(const CrossMatrix& m);

struct PivotEnvelope {
  int pivot;  // ambient factor index
  EnvelopeDescription desc;
};

// One Case-2 style pivot step per admissible pivot at the top level, keeping
// only pivots whose description closes. The certified-case shortcut is
// disabled for the top matrix (subproblems still use the full engine), so the
// results are genuinely independent derivations.
std::vector<PivotEnvelope> envelopes_by_pivot(const CrossMatrix& m);

struct CertifiedCase {
  std::string id;
  CrossMatrix matrix;
  HExpr envelope;
};

// The certified four-factor case table with hand-encoded envelope formulas.
const std::vector<CertifiedCase>& nine_cases();

// The four-variable description that provably is no cross envelope.
HExpr qtilde_expr();

struct QtildeReport {
  int candidates = 0;
  std::vector<std::string> matches;  // candidate ids found desc_equal
  DescEqualParams params;
};

// Compares the qtilde description against each candidate (id, expr over h1..h4).
QtildeReport qtilde_check(const std::vector<std::pair<std::string, HExpr>>& candidates,
                          DescEqualParams params = {});

struct SystemsReport {
  long long samples = 0;
  long long counterexamples = 0;
  std::uint64_t seed = 0;
  std::optional<std::vector<Rat>> first_counterexample;
};

// Samples h in [0,1)^4 and checks that the two three-condition systems from
// the grouped two-fold derivation (composite terms replaced by their closed
// forms) hold for exactly the same points.
SystemsReport systems_equiv_check(long long n_samples, std::uint64_t seed);

}  // namespace across
