#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "across/cross.hpp"
#include "across/hexpr.hpp"
#include "across/radial.hpp"

namespace across {

// One log-radius axis: lattice linspace(t_min, t_max, n) with the factor's
// log r placed exactly on the lattice so the ramp region [log r, log R] is
// resolved by an integer number of cells.
struct GridAxis {
  double t_min = 0.0;
  double t_max = 0.0;  // = log R
  double log_r = 0.0;  // anchor, strictly between t_min and t_max
  int n = 0;           // >= 17
};

class LogGrid {
 public:
  static LogGrid from_axes(std::vector<GridAxis> axes);
  // One axis per factor, n_pts[j] points; t_max = log R_j and log r_j sits on
  // the lattice at index anchor_index(n_pts[j]), which fixes t_min.
  static LogGrid for_model(const RadialModel& model, const std::vector<int>& n_pts);
  static LogGrid for_model(const RadialModel& model, int n_pts);
  static LogGrid for_factor(const RadialFactor& f, int n_pts);

  // Lattice index carrying log r: round((n-1)/2), so the margin below log r
  // equals the ramp width (t_min = 2 log r - log R for n odd). The margin
  // truncates the flat tail, where every target function is constant.
  static int anchor_index(int n_pts);

  int dims() const { return static_cast<int>(axes_.size()); }
  const GridAxis& axis(int j) const { return axes_[j]; }
  double step(int j) const { return (axes_[j].t_max - axes_[j].t_min) / (axes_[j].n - 1); }
  double coord(int j, int i) const { return axes_[j].t_min + i * step(j); }
  // Ball-pair profile at lattice position i of axis j: max(0, (t-logr)/(logR-logr)).
  double h_at(int j, int i) const;

  std::size_t size() const { return size_; }
  const std::vector<std::size_t>& strides() const { return strides_; }  // last axis fastest
  std::size_t flat(const std::vector<int>& x) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

struct GridFn {
  LogGrid grid;
  std::vector<double> values;      // dense, meaningful on masked points only
  std::vector<std::uint8_t> mask;  // 1 = inside domain
};

// All t_j <= cuts[j]; +infinity means the axis is unconstrained.
struct ALowerSet {
  std::vector<double> cuts;
};
// Union over matrix rows: a point belongs when some row has t_j <= cuts[j]
// at every 0-bit slot (1-bit slots unconstrained).
struct CrossRegion {
  CrossMatrix matrix;
  std::vector<double> cuts;
};
// expr(h(t)) < level with h the per-axis ball-pair profiles.
struct DomainSublevel {
  HExpr expr;
  double level = 1.0;
};
using RegionSpec = std::variant<ALowerSet, CrossRegion, DomainSublevel>;

bool region_contains(const RegionSpec& region, const LogGrid& grid, const std::vector<int>& x);

struct SolveResult {
  GridFn fn;
  long long sweeps = 0;
  double residual = 0.0;
  // Most negative slack of the solver's own constraint set at the solution
  // (anchored convexity + monotonicity); >= -1e-9 once converged.
  double constraint_slack = 0.0;
};

// Optional boundary locator: given a masked lattice point x and a unit lattice
// direction delta whose neighbor x+delta is off the mask, returns the fraction
// theta in (0,1] of the cell at which the domain boundary crosses, so the
// value-1 anchor can sit on the true boundary instead of the next lattice
// point. Returning 1 recovers the plain one-cell-out anchor.
using BoundaryLocator =
    std::function<double(const std::vector<int>& x, const std::vector<int>& delta)>;

// Greatest grid function u <= obstacle satisfying, at every masked point,
// convexity along every lattice line with direction components in {-1,0,1}
// and monotonicity u(x) <= u(x+e_j). The monotone bound treats a neighbor
// beyond the mask or grid as value 1 (the u <= 1 boundary behavior of the
// continuous problem). Convexity anchors a value-1 node where a line leaves
// the mask through an in-grid point (the discrete domain boundary); a
// boundary locator can slide that node onto the exact boundary within the
// cell. A line leaving through the grid edge just ends: the grid merely
// truncates the domain there, so no boundary value is imposed. Deterministic
// sequential sweeps of per-line lower-convex-hull and backward monotone
// passes until the largest update drops below tol.
SolveResult convex_monotone_envelope(const GridFn& obstacle, double tol = 1e-7,
                                     long long max_sweeps = 200000,
                                     const BoundaryLocator& boundary = {});

// Most negative constraint slack (bound minus value) over all masked points,
// with plain one-cell-out boundary anchors (no locator); >= -1e-9 after a
// solve that used no locator. Solves with a locator report their slack in
// SolveResult.
double min_constraint_slack(const GridFn& u);

// Obstacle 0 on a_region and 1 elsewhere; mask = the domain region on the
// grid; then the envelope solve, with boundary anchors slid onto the exact
// sublevel boundary when the domain is a DomainSublevel.
SolveResult compute_h_star(const RadialModel& model, const RegionSpec& a_region,
                           const RegionSpec& domain, const LogGrid& grid, double tol = 1e-7,
                           long long max_sweeps = 200000);

enum class IdentityCase { DiscFormula, PropCenter, EnvInEnv, ClaimQ6, ClaimQ7 };

struct IdentityParams {
  IdentityCase kind = IdentityCase::DiscFormula;
  int n = 0;
  int k = 0;
  int l = 0;

  int dims() const;
  std::string name() const;  // e.g. "PROP_CENTER(3,2)"
  // Left side: a-region and domain; right side: closed-form expression.
  RegionSpec a_region(const RadialModel& model) const;
  RegionSpec domain() const;
  HExpr rhs() const;
};

struct VerifyReport {
  std::string case_name;
  std::string params;         // textual model/grid parameter record
  std::vector<int> grid_pts;  // per-axis point count
  double max_dev = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  long long sweeps = 0;
  double residual = 0.0;
};

// Solves the left side on a grid over the first dims() factors of the model
// and compares with the right side on interior points (masked, and no
// unmasked grid point within 2 cells in any coordinate).
VerifyReport verify_identity(const IdentityParams& c, const RadialModel& model, int n_pts,
                             double tolerance, double tol = 1e-7, long long max_sweeps = 200000);

enum class Profile { Smoke, Desk, Deep };

int profile_points(Profile p, int dims);
double profile_tolerance(Profile p, int dims);
Profile parse_profile(const std::string& s);  // "smoke" | "desk" | "deep"

// The standing identity catalog: disc formula, center rule (2,1) (2,2) (3,2),
// layer-in-layer (2,1,2) (3,1,2) (3,2,3), and the two pair claims.
std::vector<IdentityParams> identity_catalog();

// All-ones model (r=0.5, R=1, dim=1) with the given factor count.
RadialModel default_model(int n_factors);

// Columns t_1,...,t_N,value,mask; lexicographic point order.
void export_csv(const GridFn& f, std::ostream& os);

}  // namespace across
