#include "across/hexpr.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "across/errors.hpp"

namespace across {

HExpr HExpr::var(int index) {
  if (index < 1) throw PreconditionError("variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = index;
  return HExpr(std::move(n));
}

HExpr HExpr::constant(Rat q) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->q = q;
  return HExpr(std::move(n));
}

HExpr HExpr::scale(Rat c, HExpr child) {
  if (c.is_negative()) throw PreconditionError("scale coefficient must be >= 0");
  if (c == Rat(1)) return child;
  if (c.is_zero()) return constant(Rat(0));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->q = c;
  n->kids.push_back(std::move(child));
  return HExpr(std::move(n));
}

HExpr HExpr::sum(std::vector<HExpr> kids) {
  if (kids.empty()) throw PreconditionError("sum needs at least one operand");
  if (kids.size() == 1) return kids[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->kids = std::move(kids);
  return HExpr(std::move(n));
}

HExpr HExpr::max_of(std::vector<HExpr> kids) {
  if (kids.empty()) throw PreconditionError("max needs at least one operand");
  if (kids.size() == 1) return kids[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Max;
  n->kids = std::move(kids);
  return HExpr(std::move(n));
}

int HExpr::max_var() const {
  switch (kind()) {
    case Kind::Var:
      return node_->var;
    case Kind::Const:
      return 0;
    default: {
      int m = 0;
      for (const HExpr& k : node_->kids) m = std::max(m, k.max_var());
      return m;
    }
  }
}

Rat HExpr::eval(const std::vector<Rat>& h) const {
  for (const Rat& v : h)
    if (v < Rat(0) || Rat(1) < v) throw EvalDomainError("evaluation point outside [0,1]^N");
  struct Rec {
    const std::vector<Rat>& h;
    Rat run(const HExpr& e) {
      switch (e.kind()) {
        case Kind::Var: {
          int j = e.var_index();
          if (j > static_cast<int>(h.size())) throw DimensionError("evaluation point too short");
          return h[j - 1];
        }
        case Kind::Const:
          return e.constant_value();
        case Kind::Scale:
          return e.scale_coeff() * run(e.children()[0]);
        case Kind::Sum: {
          Rat s(0);
          for (const HExpr& k : e.children()) s += run(k);
          return s;
        }
        case Kind::Max: {
          Rat m = run(e.children()[0]);
          for (std::size_t i = 1; i < e.children().size(); ++i) m = rat_max(m, run(e.children()[i]));
          return m;
        }
      }
      throw Error("unreachable");
    }
  } rec{h};
  return rec.run(*this);
}

double HExpr::eval_d(const std::vector<double>& h) const {
  switch (kind()) {
    case Kind::Var:
      return h[var_index() - 1];
    case Kind::Const:
      return constant_value().to_double();
    case Kind::Scale:
      return scale_coeff().to_double() * children()[0].eval_d(h);
    case Kind::Sum: {
      double s = 0;
      for (const HExpr& k : children()) s += k.eval_d(h);
      return s;
    }
    case Kind::Max: {
      double m = children()[0].eval_d(h);
      for (std::size_t i = 1; i < children().size(); ++i) m = std::max(m, children()[i].eval_d(h));
      return m;
    }
  }
  return 0;
}

bool HExpr::is_nonneg() const {
  switch (kind()) {
    case Kind::Var:
      return true;
    case Kind::Const:
      return !constant_value().is_negative();
    case Kind::Scale:
      return children()[0].is_nonneg();
    case Kind::Sum:
      return std::all_of(children().begin(), children().end(),
                         [](const HExpr& k) { return k.is_nonneg(); });
    case Kind::Max:
      return std::any_of(children().begin(), children().end(),
                         [](const HExpr& k) { return k.is_nonneg(); });
  }
  return false;
}

bool HExpr::structurally_equal(const HExpr& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Var:
      return var_index() == o.var_index();
    case Kind::Const:
      return constant_value() == o.constant_value();
    case Kind::Scale:
      if (!(scale_coeff() == o.scale_coeff())) return false;
      break;
    default:
      break;
  }
  if (children().size() != o.children().size()) return false;
  for (std::size_t i = 0; i < children().size(); ++i)
    if (!children()[i].structurally_equal(o.children()[i])) return false;
  return true;
}

std::string HExpr::str() const {
  switch (kind()) {
    case Kind::Var:
      return "h" + std::to_string(var_index());
    case Kind::Const:
      return constant_value().str();
    case Kind::Scale:
      return "scale(" + scale_coeff().str() + "," + children()[0].str() + ")";
    case Kind::Sum:
    case Kind::Max: {
      std::string out = kind() == Kind::Sum ? "sum(" : "max(";
      for (std::size_t i = 0; i < children().size(); ++i) {
        if (i) out += ",";
        out += children()[i].str();
      }
      return out + ")";
    }
  }
  return "?";
}

HExpr HExpr::substitute_vars(const std::vector<std::pair<int, HExpr>>& map) const {
  switch (kind()) {
    case Kind::Var:
      for (const auto& [from, to] : map)
        if (from == var_index()) return to;
      return *this;
    case Kind::Const:
      return *this;
    case Kind::Scale:
      return scale(scale_coeff(), children()[0].substitute_vars(map));
    case Kind::Sum:
    case Kind::Max: {
      std::vector<HExpr> kids;
      kids.reserve(children().size());
      for (const HExpr& k : children()) kids.push_back(k.substitute_vars(map));
      return kind() == Kind::Sum ? sum(std::move(kids)) : max_of(std::move(kids));
    }
  }
  return *this;
}

namespace {

struct TextParser {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool try_consume(const std::string& tok) {
    skip_ws();
    if (s.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      throw ParseError("expression: expected '" + std::string(1, c) + "' at offset " +
                       std::to_string(pos));
    ++pos;
  }
  long long parse_int() {
    skip_ws();
    std::size_t start = pos;
    if (pos < s.size() && s[pos] == '-') ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start || (s[start] == '-' && pos == start + 1))
      throw ParseError("expression: expected integer at offset " + std::to_string(start));
    return std::stoll(s.substr(start, pos - start));
  }
  Rat parse_rat() {
    long long n = parse_int();
    skip_ws();
    if (pos < s.size() && s[pos] == '/') {
      ++pos;
      long long d = parse_int();
      return Rat(n, d);
    }
    return Rat(n);
  }
  std::vector<HExpr> parse_list() {
    std::vector<HExpr> kids;
    kids.push_back(parse_expr());
    skip_ws();
    while (pos < s.size() && s[pos] == ',') {
      ++pos;
      kids.push_back(parse_expr());
      skip_ws();
    }
    expect(')');
    return kids;
  }
  HExpr parse_expr() {
    skip_ws();
    if (try_consume("max(")) return HExpr::max_of(parse_list());
    if (try_consume("sum(")) return HExpr::sum(parse_list());
    if (try_consume("scale(")) {
      Rat c = parse_rat();
      expect(',');
      HExpr child = parse_expr();
      expect(')');
      return HExpr::scale(c, std::move(child));
    }
    if (pos < s.size() && s[pos] == 'h') {
      ++pos;
      long long j = parse_int();
      if (j < 1) throw ParseError("expression: variable index must be >= 1");
      return HExpr::var(static_cast<int>(j));
    }
    return HExpr::constant(parse_rat());
  }
};

}  // namespace

HExpr HExpr::parse(const std::string& text) {
  TextParser p{text};
  HExpr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("expression: trailing characters at offset " + std::to_string(p.pos));
  return e;
}

HExpr max_combine(std::vector<HExpr> parts) {
  std::vector<HExpr> flat;
  for (HExpr& p : parts) {
    if (p.kind() == HExpr::Kind::Max)
      for (const HExpr& k : p.children()) flat.push_back(k);
    else
      flat.push_back(std::move(p));
  }
  std::vector<HExpr> dedup;
  for (HExpr& f : flat) {
    bool seen = false;
    for (const HExpr& d : dedup) seen = seen || d.structurally_equal(f);
    if (!seen) dedup.push_back(std::move(f));
  }
  // A nonpositive constant operand is redundant once some other operand is
  // guaranteed nonnegative on [0,1]^N.
  std::vector<HExpr> rest;
  bool have_nonneg = false;
  for (const HExpr& d : dedup) {
    bool nonpos_const =
        d.kind() == HExpr::Kind::Const && !(Rat(0) < d.constant_value());
    if (!nonpos_const) {
      rest.push_back(d);
      have_nonneg = have_nonneg || d.is_nonneg();
    }
  }
  if (!rest.empty() && have_nonneg) return HExpr::max_of(std::move(rest));
  return HExpr::max_of(std::move(dedup));
}

CompiledExpr::CompiledExpr(const HExpr& e, std::int64_t in_den, int n_vars) {
  struct DenRec {
    std::int64_t in_den;
    std::int64_t run(const HExpr& x) {
      switch (x.kind()) {
        case HExpr::Kind::Var:
          return in_den;
        case HExpr::Kind::Const:
          return x.constant_value().den;
        case HExpr::Kind::Scale:
          return x.scale_coeff().den * run(x.children()[0]);
        default: {
          std::int64_t d = 1;
          for (const HExpr& k : x.children()) d = std::lcm(d, run(k));
          return d;
        }
      }
    }
  } den_rec{in_den};
  denom_ = std::lcm(den_rec.run(e), in_den);

  struct EmitRec {
    std::vector<Op>& ops;
    std::int64_t D;
    std::int64_t in_den;
    int n_vars;
    void run(const HExpr& x) {
      switch (x.kind()) {
        case HExpr::Kind::Var: {
          if (x.var_index() > n_vars) throw DimensionError("expression variable beyond dimension");
          ops.push_back(Op{OpKind::PushVar, x.var_index() - 1, D / in_den, 1});
          return;
        }
        case HExpr::Kind::Const: {
          const Rat& q = x.constant_value();
          ops.push_back(Op{OpKind::PushConst, 0, q.num * (D / q.den), 1});
          return;
        }
        case HExpr::Kind::Scale:
          run(x.children()[0]);
          ops.push_back(Op{OpKind::Scale, 0, x.scale_coeff().num, x.scale_coeff().den});
          return;
        case HExpr::Kind::Sum:
        case HExpr::Kind::Max: {
          for (const HExpr& k : x.children()) run(k);
          ops.push_back(Op{x.kind() == HExpr::Kind::Sum ? OpKind::Sum : OpKind::Max,
                           static_cast<int>(x.children().size()), 0, 1});
          return;
        }
      }
    }
  } emit{ops_, denom_, in_den, n_vars};
  emit.run(e);
}

std::int64_t CompiledExpr::eval_num(const std::int64_t* h_num) const {
  auto& st = stack_;
  st.clear();
  for (const Op& op : ops_) {
    switch (op.kind) {
      case OpKind::PushVar:
        st.push_back(h_num[op.arg] * op.c0);
        break;
      case OpKind::PushConst:
        st.push_back(op.c0);
        break;
      case OpKind::Scale: {
        __int128 v = static_cast<__int128>(st.back()) * op.c0;
        st.back() = static_cast<std::int64_t>(v / op.c1);
        break;
      }
      case OpKind::Sum: {
        std::int64_t s = 0;
        for (int i = 0; i < op.arg; ++i) {
          s += st.back();
          st.pop_back();
        }
        st.push_back(s);
        break;
      }
      case OpKind::Max: {
        std::int64_t m = st.back();
        st.pop_back();
        for (int i = 1; i < op.arg; ++i) {
          m = std::max(m, st.back());
          st.pop_back();
        }
        st.push_back(m);
        break;
      }
    }
  }
  return st.back();
}

namespace {

// Minimal index of y on the line (fixed other coordinates) where expr >= 1,
// or q if the whole line is a member. Uses monotonicity in y.
std::int64_t first_nonmember(const CompiledExpr& p, std::vector<std::int64_t>& h, int y_axis,
                             std::int64_t q) {
  std::int64_t lo = 0, hi = q;  // invariant: y < lo member-possible, hi..q-1 nonmember or hi==q
  while (lo < hi) {
    std::int64_t mid = (lo + hi) / 2;
    h[y_axis] = mid;
    if (p.eval_num(h.data()) >= p.denom())
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::int64_t walk_down(const CompiledExpr& p, std::vector<std::int64_t>& h, int y_axis,
                       std::int64_t t) {
  while (t > 0) {
    h[y_axis] = t - 1;
    if (p.eval_num(h.data()) >= p.denom())
      --t;
    else
      break;
  }
  return t;
}

std::vector<Rat> lattice_point(const std::vector<std::int64_t>& h, std::int64_t q) {
  std::vector<Rat> out;
  out.reserve(h.size());
  for (std::int64_t v : h) out.push_back(Rat(v, q));
  return out;
}

}  // namespace

DescEqualResult desc_equal(const HExpr& a, const HExpr& b, int n, DescEqualParams params) {
  if (n < 1) throw DimensionError("desc_equal: dimension must be >= 1");
  if (params.step.num != 1 || params.step.den < 2)
    throw PreconditionError("desc_equal: step must be of the form 1/q");
  const std::int64_t q = params.step.den;
  DescEqualResult res;
  res.step = params.step;
  res.seed = params.seed;
  res.lattice_points = 1;
  for (int i = 0; i < n; ++i) res.lattice_points *= q;

  CompiledExpr pa(a, q, n), pb(b, q, n);
  std::vector<std::int64_t> h(n, 0);

  auto report_witness = [&](const std::vector<Rat>& w) {
    res.equal = false;
    res.witness = w;
  };

  if (n == 1) {
    std::int64_t t1 = first_nonmember(pa, h, 0, q);
    std::int64_t t2 = first_nonmember(pb, h, 0, q);
    if (t1 != t2) {
      h[0] = std::min(t1, t2);
      report_witness(lattice_point(h, q));
      return res;
    }
  } else {
    const int x_axis = n - 2, y_axis = n - 1;
    std::vector<std::int64_t> prefix(std::max(0, n - 2), 0);
    bool more = true;
    while (more) {
      for (int i = 0; i < n - 2; ++i) h[i] = prefix[i];
      h[x_axis] = 0;
      std::int64_t t1 = first_nonmember(pa, h, y_axis, q);
      std::int64_t t2 = first_nonmember(pb, h, y_axis, q);
      if (!(t1 == 0 && t2 == 0)) {  // otherwise the whole plane is outside both sets
        for (std::int64_t x = 0; x < q; ++x) {
          h[x_axis] = x;
          if (x > 0) {
            t1 = walk_down(pa, h, y_axis, t1);
            t2 = walk_down(pb, h, y_axis, t2);
          }
          if (t1 != t2) {
            h[y_axis] = std::min(t1, t2);
            report_witness(lattice_point(h, q));
            return res;
          }
          if (t1 == 0 && t2 == 0) break;  // lines only shrink with x
        }
      }
      // odometer over the prefix, lexicographic
      more = false;
      for (int i = n - 3; i >= 0; --i) {
        if (++prefix[i] < q) {
          more = true;
          break;
        }
        prefix[i] = 0;
      }
    }
  }

  // Random rational phase, h_j = r_j / 2^16 with the top 16 bits of each draw.
  const std::int64_t rden = 65536;
  CompiledExpr ra(a, rden, n), rb(b, rden, n);
  std::mt19937_64 rng(params.seed);
  std::vector<std::int64_t> r(n);
  for (int i = 0; i < params.n_random; ++i) {
    for (int j = 0; j < n; ++j) r[j] = static_cast<std::int64_t>(rng() >> 48);
    ++res.random_samples;
    bool ma = ra.eval_num(r.data()) < ra.denom();
    bool mb = rb.eval_num(r.data()) < rb.denom();
    if (ma != mb) {
      report_witness(lattice_point(r, rden));
      return res;
    }
  }
  return res;
}

std::optional<std::vector<Rat>> desc_subset_violation(const HExpr& a, const HExpr& b, int n,
                                                      Rat step) {
  if (n < 1) throw DimensionError("desc_subset: dimension must be >= 1");
  if (step.num != 1 || step.den < 2)
    throw PreconditionError("desc_subset: step must be of the form 1/q");
  const std::int64_t q = step.den;
  CompiledExpr pa(a, q, n), pb(b, q, n);
  std::vector<std::int64_t> h(n, 0);
  if (n == 1) {
    std::int64_t t1 = first_nonmember(pa, h, 0, q);
    std::int64_t t2 = first_nonmember(pb, h, 0, q);
    if (t2 < t1) {
      h[0] = t2;
      return lattice_point(h, q);
    }
    return std::nullopt;
  }
  const int x_axis = n - 2, y_axis = n - 1;
  std::vector<std::int64_t> prefix(std::max(0, n - 2), 0);
  bool more = true;
  while (more) {
    for (int i = 0; i < n - 2; ++i) h[i] = prefix[i];
    h[x_axis] = 0;
    std::int64_t t1 = first_nonmember(pa, h, y_axis, q);
    std::int64_t t2 = first_nonmember(pb, h, y_axis, q);
    if (t1 != 0) {  // otherwise {a<1} misses this plane entirely
      for (std::int64_t x = 0; x < q; ++x) {
        h[x_axis] = x;
        if (x > 0) {
          t1 = walk_down(pa, h, y_axis, t1);
          t2 = walk_down(pb, h, y_axis, t2);
        }
        if (t2 < t1) {
          h[y_axis] = t2;
          return lattice_point(h, q);
        }
        if (t1 == 0) break;
      }
    }
    more = false;
    for (int i = n - 3; i >= 0; --i) {
      if (++prefix[i] < q) {
        more = true;
        break;
      }
      prefix[i] = 0;
    }
  }
  return std::nullopt;
}

}  // namespace across
