#include "across/toric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "across/envelope.hpp"
#include "across/errors.hpp"

namespace across {

// ---------------------------------------------------------------------------
// LogGrid

LogGrid LogGrid::from_axes(std::vector<GridAxis> axes) {
  if (axes.empty()) throw DimensionError("grid needs at least one axis");
  LogGrid g;
  for (const GridAxis& a : axes) {
    if (a.n < 17) throw PreconditionError("grid axis needs at least 17 points");
    if (!(a.t_min < a.log_r) || !(a.log_r < a.t_max))
      throw PreconditionError("grid axis needs t_min < log r < t_max");
  }
  g.axes_ = std::move(axes);
  g.strides_.assign(g.axes_.size(), 1);
  for (int j = static_cast<int>(g.axes_.size()) - 2; j >= 0; --j)
    g.strides_[j] = g.strides_[j + 1] * static_cast<std::size_t>(g.axes_[j + 1].n);
  g.size_ = g.strides_[0] * static_cast<std::size_t>(g.axes_[0].n);
  return g;
}

int LogGrid::anchor_index(int n_pts) {
  return static_cast<int>(std::lround((n_pts - 1) / 2.0));
}

LogGrid LogGrid::for_factor(const RadialFactor& f, int n_pts) {
  if (n_pts < 17) throw PreconditionError("grid axis needs at least 17 points");
  const double lr = std::log(f.r);
  const double lR = std::log(f.R);
  const int ir = anchor_index(n_pts);
  const double step = (lR - lr) / (n_pts - 1 - ir);
  GridAxis a;
  a.t_min = lr - ir * step;
  a.t_max = lR;
  a.log_r = lr;
  a.n = n_pts;
  return from_axes({a});
}

LogGrid LogGrid::for_model(const RadialModel& model, const std::vector<int>& n_pts) {
  if (static_cast<int>(n_pts.size()) != model.size())
    throw DimensionError("one point count per model factor required");
  std::vector<GridAxis> axes;
  for (int j = 0; j < model.size(); ++j)
    axes.push_back(for_factor(model.factors[j], n_pts[j]).axis(0));
  return from_axes(std::move(axes));
}

LogGrid LogGrid::for_model(const RadialModel& model, int n_pts) {
  return for_model(model, std::vector<int>(model.factors.size(), n_pts));
}

double LogGrid::h_at(int j, int i) const {
  const GridAxis& a = axes_[j];
  const double t = coord(j, i);
  if (t <= a.log_r) return 0.0;
  return (t - a.log_r) / (a.t_max - a.log_r);
}

std::size_t LogGrid::flat(const std::vector<int>& x) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) idx += strides_[j] * static_cast<std::size_t>(x[j]);
  return idx;
}

// ---------------------------------------------------------------------------
// Regions

namespace {

bool cut_ok(double t, double cut) {
  if (std::isinf(cut)) return cut > 0;
  return t <= cut + 1e-9 * (1.0 + std::abs(cut));
}

}  // namespace

bool region_contains(const RegionSpec& region, const LogGrid& grid, const std::vector<int>& x) {
  const int d = grid.dims();
  if (const auto* ls = std::get_if<ALowerSet>(&region)) {
    if (static_cast<int>(ls->cuts.size()) != d)
      throw DimensionError("lower-set region: one cut per axis required");
    for (int j = 0; j < d; ++j)
      if (!cut_ok(grid.coord(j, x[j]), ls->cuts[j])) return false;
    return true;
  }
  if (const auto* cr = std::get_if<CrossRegion>(&region)) {
    if (cr->matrix.width() != d || static_cast<int>(cr->cuts.size()) != d)
      throw DimensionError("cross region: matrix width and cuts must match the grid");
    for (const Row& row : cr->matrix.rows()) {
      bool inside = true;
      for (int j = 0; j < d && inside; ++j)
        if (row[j] == 0) inside = cut_ok(grid.coord(j, x[j]), cr->cuts[j]);
      if (inside) return true;
    }
    return false;
  }
  const auto& sl = std::get<DomainSublevel>(region);
  if (sl.expr.max_var() > d) throw DimensionError("sublevel region: expression variable out of range");
  std::vector<double> h(d);
  for (int j = 0; j < d; ++j) h[j] = grid.h_at(j, x[j]);
  return sl.expr.eval_d(h) < sl.level;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// Walks the odometer x over the full box; returns false after the last point.
bool advance(std::vector<int>& x, const LogGrid& g) {
  for (int j = g.dims() - 1; j >= 0; --j) {
    if (++x[j] < g.axis(j).n) return true;
    x[j] = 0;
  }
  return false;
}

struct Direction {
  std::vector<int> delta;      // per-axis step, entries in {-1,0,1}
  std::ptrdiff_t flat_step = 0;
  bool is_axis = false;
};

// Every lattice direction with components in {-1,0,1}, one per +/- pair
// (first nonzero component positive), in a fixed deterministic order:
// single-axis directions first, then by increasing axis count.
std::vector<Direction> all_directions(const LogGrid& g) {
  const int d = g.dims();
  std::vector<Direction> dirs;
  std::vector<int> delta(d, -1);
  for (;;) {
    int first = 0;
    while (first < d && delta[first] == 0) ++first;
    if (first < d && delta[first] > 0) {
      Direction dir;
      dir.delta = delta;
      int nz = 0;
      for (int j = 0; j < d; ++j) {
        nz += delta[j] != 0;
        dir.flat_step += delta[j] * static_cast<std::ptrdiff_t>(g.strides()[j]);
      }
      dir.is_axis = nz == 1;
      dirs.push_back(std::move(dir));
    }
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++delta[j] <= 1) break;
      delta[j] = -1;
    }
    if (j < 0) break;
  }
  std::stable_sort(dirs.begin(), dirs.end(), [](const Direction& a, const Direction& b) {
    auto nz = [](const Direction& v) {
      int c = 0;
      for (int e : v.delta) c += e != 0;
      return c;
    };
    return nz(a) < nz(b);
  });
  return dirs;
}

// A maximal masked segment of a lattice line: values at first, first+step,
// ..., first+(len-1)*step. Where the segment ends against an in-grid
// unmasked point (the discrete domain boundary) a value-1 anchor sits th_lo
// cells before the first point / th_hi cells after the last; where it ends
// at the grid edge there is no anchor (the domain is merely truncated
// there, so no boundary value is known).
struct Run {
  std::size_t first = 0;
  std::ptrdiff_t step = 0;
  int len = 0;
  double th_lo = 1.0;
  double th_hi = 1.0;
  bool has_lo = false;
  bool has_hi = false;
};

struct SolverPlan {
  std::vector<Direction> dirs;
  std::vector<std::vector<Run>> runs;  // parallel to dirs
};

bool in_box(const std::vector<int>& x, const LogGrid& g) {
  for (int j = 0; j < g.dims(); ++j)
    if (x[j] < 0 || x[j] >= g.axis(j).n) return false;
  return true;
}

SolverPlan build_plan(const GridFn& obstacle, const BoundaryLocator& boundary) {
  const LogGrid& g = obstacle.grid;
  SolverPlan plan;
  plan.dirs = all_directions(g);
  plan.runs.resize(plan.dirs.size());
  std::vector<int> x(g.dims(), 0), y(g.dims(), 0), neg(g.dims(), 0);
  for (std::size_t f = 0; f < plan.dirs.size(); ++f) {
    const Direction& dir = plan.dirs[f];
    for (int j = 0; j < g.dims(); ++j) neg[j] = -dir.delta[j];
    std::fill(x.begin(), x.end(), 0);
    std::size_t flat = 0;
    do {
      // line start: stepping backward leaves the box
      bool start = false;
      for (int j = 0; j < g.dims() && !start; ++j)
        if (dir.delta[j] != 0) {
          const int prev = x[j] - dir.delta[j];
          start = prev < 0 || prev >= g.axis(j).n;
        }
      if (start) {
        int len = std::numeric_limits<int>::max();
        for (int j = 0; j < g.dims(); ++j) {
          if (dir.delta[j] == 0) continue;
          const int room = dir.delta[j] > 0 ? g.axis(j).n - x[j] : x[j] + 1;
          len = std::min(len, room);
        }
        std::size_t p = flat;
        std::vector<int> pt = x;
        int i = 0;
        while (i < len) {
          while (i < len && !obstacle.mask[p]) {
            p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + dir.flat_step);
            for (int j = 0; j < g.dims(); ++j) pt[j] += dir.delta[j];
            ++i;
          }
          if (i == len) break;
          Run run;
          run.first = p;
          run.step = dir.flat_step;
          run.len = 0;
          while (i < len && obstacle.mask[p]) {
            ++run.len;
            p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + dir.flat_step);
            for (int j = 0; j < g.dims(); ++j) pt[j] += dir.delta[j];
            ++i;
          }
          // pt now sits just past the run's last point
          if (in_box(pt, g)) {
            run.has_hi = true;
            if (boundary) {
              for (int j = 0; j < g.dims(); ++j) y[j] = pt[j] - dir.delta[j];
              run.th_hi = boundary(y, dir.delta);
            }
          }
          for (int j = 0; j < g.dims(); ++j)
            y[j] = pt[j] - run.len * dir.delta[j];  // run's first point
          std::vector<int> before = y;
          for (int j = 0; j < g.dims(); ++j) before[j] -= dir.delta[j];
          if (in_box(before, g)) {
            run.has_lo = true;
            if (boundary) run.th_lo = boundary(y, neg);
          }
          plan.runs[f].push_back(run);
        }
      }
      ++flat;
    } while (advance(x, g));
  }
  return plan;
}

// Largest convex minorant over one run, with value-1 anchors at the
// fractional offsets where the run meets the domain boundary; returns the
// largest decrease.
double relax_run_hull(GridFn& u, const Run& run, std::vector<double>& pos,
                      std::vector<double>& val, std::vector<int>& hull) {
  if (run.len < 2) return 0.0;
  pos.clear();
  val.clear();
  if (run.has_lo) {
    pos.push_back(-run.th_lo);
    val.push_back(1.0);
  }
  std::size_t p = run.first;
  for (int i = 0; i < run.len; ++i) {
    pos.push_back(i);
    val.push_back(u.values[p]);
    p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + run.step);
  }
  if (run.has_hi) {
    pos.push_back(run.len - 1 + run.th_hi);
    val.push_back(1.0);
  }

  const int m = static_cast<int>(val.size());
  hull.clear();
  for (int i = 0; i < m; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull[hull.size() - 1];
      if ((pos[b] - pos[a]) * (val[i] - val[a]) - (val[b] - val[a]) * (pos[i] - pos[a]) <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  double delta = 0.0;
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const int a = hull[s], b = hull[s + 1];
    for (int i = a + 1; i < b; ++i) {
      const double lin =
          val[a] + (val[b] - val[a]) * (pos[i] - pos[a]) / (pos[b] - pos[a]);
      if (lin < val[i]) {
        delta = std::max(delta, val[i] - lin);
        val[i] = lin;
      }
    }
  }
  if (delta > 0.0) {
    const int base = run.has_lo ? 1 : 0;
    p = run.first;
    for (int i = 0; i < run.len; ++i) {
      u.values[p] = std::min(u.values[p], val[base + i]);
      p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + run.step);
    }
  }
  return delta;
}

// u nondecreasing along the run, with bound 1 past its upper end.
double relax_run_monotone(GridFn& u, const Run& run) {
  double delta = 0.0;
  double bound = 1.0;
  std::size_t p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(run.first) +
                                           (run.len - 1) * run.step);
  for (int i = run.len; i-- > 0;) {
    if (u.values[p] > bound) {
      delta = std::max(delta, u.values[p] - bound);
      u.values[p] = bound;
    }
    bound = u.values[p];
    p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) - run.step);
  }
  return delta;
}

double plan_slack(const GridFn& u, const SolverPlan& plan) {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < plan.dirs.size(); ++f) {
    for (const Run& run : plan.runs[f]) {
      std::size_t p = run.first;
      double prev_val = 1.0;
      double prev_pos = -run.th_lo;
      for (int i = 0; i < run.len; ++i) {
        const double here = u.values[p];
        double next_val = 1.0;
        double next_pos = i + (i + 1 < run.len ? 1.0 : run.th_hi);
        if (i + 1 < run.len)
          next_val = u.values[static_cast<std::size_t>(
              static_cast<std::ptrdiff_t>(p) + run.step)];
        // chord through the neighbors, evaluated at i; a missing boundary
        // anchor means no convexity constraint binds at that end
        const bool lo_ok = i > 0 || run.has_lo;
        const bool hi_ok = i + 1 < run.len || run.has_hi;
        if (lo_ok && hi_ok) {
          const double chord = prev_val + (next_val - prev_val) * (i - prev_pos) /
                                              (next_pos - prev_pos);
          slack = std::min(slack, chord - here);
        }
        if (plan.dirs[f].is_axis)
          slack = std::min(slack, (hi_ok ? next_val : 1.0) - here);
        prev_val = here;
        prev_pos = i;
        p = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + run.step);
      }
    }
  }
  return slack;
}

SolveResult solve_with_plan(const GridFn& obstacle, double tol, long long max_sweeps,
                            const BoundaryLocator& boundary) {
  const LogGrid& g = obstacle.grid;
  if (obstacle.values.size() != g.size() || obstacle.mask.size() != g.size())
    throw DimensionError("obstacle arrays must match the grid size");
  bool any_masked = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!obstacle.mask[i]) continue;
    any_masked = true;
    if (obstacle.values[i] < 0.0 || obstacle.values[i] > 1.0)
      throw PreconditionError("obstacle values must lie in [0,1] on the mask");
  }
  if (!any_masked) throw PreconditionError("mask is empty");

  const SolverPlan plan = build_plan(obstacle, boundary);
  SolveResult result;
  result.fn = obstacle;
  GridFn& u = result.fn;
  std::vector<double> pos, val;
  std::vector<int> hull;

  for (long long sweep = 1; sweep <= max_sweeps; ++sweep) {
    double delta = 0.0;
    for (std::size_t f = 0; f < plan.dirs.size(); ++f) {
      if (!plan.dirs[f].is_axis) continue;
      for (const Run& run : plan.runs[f])
        delta = std::max(delta, relax_run_monotone(u, run));
    }
    for (std::size_t f = 0; f < plan.dirs.size(); ++f)
      for (const Run& run : plan.runs[f])
        delta = std::max(delta, relax_run_hull(u, run, pos, val, hull));
    result.sweeps = sweep;
    result.residual = delta;
    if (delta < tol) {
      result.constraint_slack = plan_slack(u, plan);
      return result;
    }
  }
  throw ConvergenceError("sweep limit reached with residual " + std::to_string(result.residual),
                         result.residual);
}

}  // namespace

SolveResult convex_monotone_envelope(const GridFn& obstacle, double tol, long long max_sweeps,
                                     const BoundaryLocator& boundary) {
  return solve_with_plan(obstacle, tol, max_sweeps, boundary);
}

double min_constraint_slack(const GridFn& u) {
  return plan_slack(u, build_plan(u, {}));
}

SolveResult compute_h_star(const RadialModel& model, const RegionSpec& a_region,
                           const RegionSpec& domain, const LogGrid& grid, double tol,
                           long long max_sweeps) {
  if (model.size() != grid.dims())
    throw DimensionError("model factor count must match the grid dimension");
  GridFn obstacle;
  obstacle.grid = grid;
  obstacle.values.assign(grid.size(), 1.0);
  obstacle.mask.assign(grid.size(), 0);

  std::vector<int> x(grid.dims(), 0);
  std::size_t flat = 0;
  std::size_t zero_pts = 0;
  do {
    const bool in_a = region_contains(a_region, grid, x);
    const bool in_dom = region_contains(domain, grid, x);
    // containment is demanded strictly inside the grid box; on the outermost
    // planes an a_region factor spanning its whole disc legitimately grazes
    // the domain boundary, and those points are simply left unmasked
    bool interior = true;
    for (int j = 0; j < grid.dims(); ++j) interior = interior && x[j] + 1 < grid.axis(j).n;
    if (interior && in_a && !in_dom)
      throw PreconditionError("a_region must be contained in the domain on the grid");
    obstacle.mask[flat] = in_dom ? 1 : 0;
    if (in_a) obstacle.values[flat] = 0.0;
    if (in_dom && in_a) ++zero_pts;
    ++flat;
  } while (advance(x, grid));
  if (zero_pts == 0) throw DegenerateSetError("a_region contains no masked grid point");

  // lower-closedness of the mask per axis
  std::fill(x.begin(), x.end(), 0);
  flat = 0;
  do {
    if (obstacle.mask[flat]) {
      for (int j = 0; j < grid.dims(); ++j) {
        if (x[j] == 0) continue;
        if (!obstacle.mask[flat - grid.strides()[j]])
          throw PreconditionError("domain mask must be lower-closed along every axis");
      }
    }
    ++flat;
  } while (advance(x, grid));

  // For sublevel domains, anchors can sit on the exact domain boundary: along
  // a line leaving the mask, bisect the unique crossing of the level (the
  // expression is convex along segments). The returned offset stays strictly
  // inside the sublevel set, so a value-1 anchor there never cuts below any
  // admissible function.
  BoundaryLocator locator;
  if (const auto* sub = std::get_if<DomainSublevel>(&domain)) {
    const HExpr expr = sub->expr;
    const double level = sub->level;
    const LogGrid g = grid;
    locator = [expr, level, g](const std::vector<int>& x, const std::vector<int>& delta) {
      const int d = g.dims();
      std::vector<double> h(d);
      auto eval_at = [&](double s) {
        for (int j = 0; j < d; ++j) {
          const GridAxis& ax = g.axis(j);
          const double t = g.coord(j, x[j]) + s * delta[j] * g.step(j);
          h[j] = std::max(0.0, (t - ax.log_r) / (ax.t_max - ax.log_r));
        }
        return expr.eval_d(h);
      };
      if (eval_at(1.0) < level) return 1.0;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eval_at(mid) < level ? lo : hi) = mid;
      }
      return std::max(lo, 1e-9);
    };
  }
  return convex_monotone_envelope(obstacle, tol, max_sweeps, locator);
}

// ---------------------------------------------------------------------------
// Identity catalog

int IdentityParams::dims() const {
  switch (kind) {
    case IdentityCase::DiscFormula:
      return 1;
    case IdentityCase::PropCenter:
    case IdentityCase::EnvInEnv:
      return n;
    case IdentityCase::ClaimQ6:
      return 2;
    case IdentityCase::ClaimQ7:
      return 3;
  }
  return 0;
}

std::string IdentityParams::name() const {
  switch (kind) {
    case IdentityCase::DiscFormula:
      return "DISC_FORMULA";
    case IdentityCase::PropCenter:
      return "PROP_CENTER(" + std::to_string(n) + "," + std::to_string(k) + ")";
    case IdentityCase::EnvInEnv:
      return "ENV_IN_ENV(" + std::to_string(n) + "," + std::to_string(k) + "," +
             std::to_string(l) + ")";
    case IdentityCase::ClaimQ6:
      return "CLAIM_Q6";
    case IdentityCase::ClaimQ7:
      return "CLAIM_Q7";
  }
  return "?";
}

RegionSpec IdentityParams::a_region(const RadialModel& model) const {
  const double inf = std::numeric_limits<double>::infinity();
  auto log_r = [&](int j) { return std::log(model.factors[j].r); };
  switch (kind) {
    case IdentityCase::DiscFormula:
      return ALowerSet{{log_r(0)}};
    case IdentityCase::PropCenter: {
      std::vector<double> cuts;
      for (int j = 0; j < n; ++j) cuts.push_back(log_r(j));
      return ALowerSet{std::move(cuts)};
    }
    case IdentityCase::EnvInEnv: {
      std::vector<double> cuts;
      for (int j = 0; j < n; ++j) cuts.push_back(log_r(j));
      return CrossRegion{layer_matrix(n, k), std::move(cuts)};
    }
    case IdentityCase::ClaimQ6:
      return ALowerSet{{log_r(0), inf}};
    case IdentityCase::ClaimQ7:
      return ALowerSet{{log_r(0), log_r(1), inf}};
  }
  throw PreconditionError("unknown identity case");
}

RegionSpec IdentityParams::domain() const {
  switch (kind) {
    case IdentityCase::DiscFormula:
      return DomainSublevel{HExpr::var(1), 1.0};
    case IdentityCase::PropCenter:
      return DomainSublevel{nk_envelope(n, k), 1.0};
    case IdentityCase::EnvInEnv:
      return DomainSublevel{nk_envelope(n, l), 1.0};
    case IdentityCase::ClaimQ6:
      return DomainSublevel{HExpr::sum({HExpr::var(1), HExpr::var(2)}), 1.0};
    case IdentityCase::ClaimQ7:
      return DomainSublevel{nk_envelope(3, 2), 1.0};
  }
  throw PreconditionError("unknown identity case");
}

HExpr IdentityParams::rhs() const {
  switch (kind) {
    case IdentityCase::DiscFormula:
      return HExpr::var(1);
    case IdentityCase::PropCenter: {
      std::vector<int> slots(n);
      std::iota(slots.begin(), slots.end(), 1);
      return rule_prop_center(slots, {}, k);
    }
    case IdentityCase::EnvInEnv:
      return rule_env_in_env(n, k, l);
    case IdentityCase::ClaimQ6:
      return rule_claim_q6(1, 2);
    case IdentityCase::ClaimQ7:
      return rule_prop_center({1, 2}, {3}, 2);
  }
  throw PreconditionError("unknown identity case");
}

namespace {

void validate_params(const IdentityParams& c) {
  switch (c.kind) {
    case IdentityCase::DiscFormula:
      return;
    case IdentityCase::PropCenter:
      if (c.n < 1 || c.k < 1 || c.k > c.n) throw PreconditionError("need 1 <= k <= n");
      return;
    case IdentityCase::EnvInEnv:
      if (c.n < 2 || c.k < 1 || c.k >= c.l || c.l > c.n)
        throw PreconditionError("need 1 <= k < l <= n");
      return;
    case IdentityCase::ClaimQ6:
    case IdentityCase::ClaimQ7:
      return;
  }
}

}  // namespace

VerifyReport verify_identity(const IdentityParams& c, const RadialModel& model, int n_pts,
                             double tolerance, double tol, long long max_sweeps) {
  validate_params(c);
  const int d = c.dims();
  if (d < 1 || d > 3)
    throw PreconditionError("identity cases are limited to grids over at most 3 factors");
  if (model.size() < d) throw DimensionError("model has fewer factors than the case needs");
  RadialModel sub;
  sub.factors.assign(model.factors.begin(), model.factors.begin() + d);
  const LogGrid grid = LogGrid::for_model(sub, n_pts);

  SolveResult solved = compute_h_star(sub, c.a_region(sub), c.domain(), grid, tol, max_sweeps);
  const GridFn& u = solved.fn;
  const HExpr rhs = c.rhs();

  // interior = masked, with no unmasked grid point within two cells
  double max_dev = 0.0;
  std::vector<int> x(d, 0);
  std::size_t flat = 0;
  std::vector<int> y(d, 0);
  do {
    if (u.mask[flat]) {
      bool interior = true;
      std::vector<int> lo(d), hi(d);
      for (int j = 0; j < d; ++j) {
        lo[j] = std::max(0, x[j] - 2);
        hi[j] = std::min(grid.axis(j).n - 1, x[j] + 2);
        y[j] = lo[j];
      }
      while (interior) {
        if (!u.mask[grid.flat(y)]) interior = false;
        int j = d - 1;
        for (; j >= 0; --j) {
          if (++y[j] <= hi[j]) break;
          y[j] = lo[j];
        }
        if (j < 0) break;
      }
      if (interior) {
        std::vector<double> h(d);
        for (int j = 0; j < d; ++j) h[j] = grid.h_at(j, x[j]);
        max_dev = std::max(max_dev, std::abs(u.values[flat] - rhs.eval_d(h)));
      }
    }
    ++flat;
  } while (advance(x, grid));

  VerifyReport report;
  report.case_name = c.name();
  {
    std::ostringstream os;
    os << "r=(";
    for (int j = 0; j < d; ++j) os << (j ? "," : "") << sub.factors[j].r;
    os << ") R=(";
    for (int j = 0; j < d; ++j) os << (j ? "," : "") << sub.factors[j].R;
    os << ") solver_tol=" << tol;
    report.params = os.str();
  }
  report.grid_pts.assign(d, n_pts);
  report.max_dev = max_dev;
  report.tolerance = tolerance;
  report.pass = max_dev <= tolerance;
  report.sweeps = solved.sweeps;
  report.residual = solved.residual;
  return report;
}

int profile_points(Profile p, int dims) {
  switch (p) {
    case Profile::Smoke:
      return 33;
    case Profile::Desk:
      return dims == 1 ? 513 : dims == 2 ? 129 : 65;
    case Profile::Deep:
      return dims == 1 ? 1025 : dims == 2 ? 257 : 129;
  }
  return 33;
}

double profile_tolerance(Profile p, int dims) {
  if (p == Profile::Smoke) return 0.1;
  return dims == 1 ? 5e-3 : dims == 2 ? 2e-2 : 3e-2;
}

Profile parse_profile(const std::string& s) {
  if (s == "smoke") return Profile::Smoke;
  if (s == "desk") return Profile::Desk;
  if (s == "deep") return Profile::Deep;
  throw ParseError("unknown profile: " + s);
}

std::vector<IdentityParams> identity_catalog() {
  using C = IdentityCase;
  return {
      {C::DiscFormula, 0, 0, 0}, {C::PropCenter, 2, 1, 0}, {C::PropCenter, 2, 2, 0},
      {C::PropCenter, 3, 2, 0},  {C::EnvInEnv, 2, 1, 2},   {C::EnvInEnv, 3, 1, 2},
      {C::EnvInEnv, 3, 2, 3},    {C::ClaimQ6, 0, 0, 0},    {C::ClaimQ7, 0, 0, 0},
  };
}

RadialModel default_model(int n_factors) {
  RadialModel m;
  m.factors.assign(static_cast<std::size_t>(n_factors), RadialFactor{0.5, 1.0, 1});
  return m;
}

void export_csv(const GridFn& f, std::ostream& os) {
  const LogGrid& g = f.grid;
  for (int j = 0; j < g.dims(); ++j) os << "t_" << (j + 1) << ",";
  os << "value,mask\n";
  std::vector<int> x(g.dims(), 0);
  std::size_t flat = 0;
  do {
    for (int j = 0; j < g.dims(); ++j) os << g.coord(j, x[j]) << ",";
    os << f.values[flat] << "," << static_cast<int>(f.mask[flat]) << "\n";
    ++flat;
  } while (advance(x, g));
}

}  // namespace across
