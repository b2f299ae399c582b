#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "across/envelope.hpp"
#include "across/errors.hpp"
#include "across/toric.hpp"

using namespace across;

namespace {

const double kLogHalf = std::log(0.5);

// Matches the reporting filter: masked, and no unmasked in-grid point within
// two cells in any coordinate.
bool interior_point(const GridFn& f, const std::vector<int>& x) {
  const LogGrid& g = f.grid;
  const int d = g.dims();
  std::vector<int> lo(d), hi(d), y(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = std::max(0, x[j] - 2);
    hi[j] = std::min(g.axis(j).n - 1, x[j] + 2);
    y[j] = lo[j];
  }
  while (true) {
    if (!f.mask[g.flat(y)]) return false;
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++y[j] <= hi[j]) break;
      y[j] = lo[j];
    }
    if (j < 0) return true;
  }
}

bool next_point(std::vector<int>& x, const LogGrid& g) {
  for (int j = g.dims() - 1; j >= 0; --j) {
    if (++x[j] < g.axis(j).n) return true;
    x[j] = 0;
  }
  return false;
}

}  // namespace

TEST_CASE("log grid construction") {
  const LogGrid g = LogGrid::for_factor(RadialFactor{0.5, 1.0, 1}, 33);
  CHECK(g.dims() == 1);
  CHECK(g.axis(0).n == 33);
  CHECK(g.axis(0).t_max == 0.0);  // log 1
  CHECK(LogGrid::anchor_index(33) == 16);
  CHECK(g.coord(0, 16) == doctest::Approx(kLogHalf).epsilon(1e-12));
  CHECK(g.h_at(0, 16) == doctest::Approx(0.0));
  CHECK(g.h_at(0, 8) == 0.0);   // below log r the profile is clamped at 0
  CHECK(g.h_at(0, 32) == doctest::Approx(1.0));
  CHECK(g.h_at(0, 24) == doctest::Approx(0.5));

  const RadialModel m = make_model({{0.5, 1.0, 1}, {0.25, 2.0, 1}});
  const LogGrid g2 = LogGrid::for_model(m, 17);
  CHECK(g2.dims() == 2);
  CHECK(g2.size() == 17u * 17u);
  CHECK(g2.strides()[1] == 1u);  // last axis fastest
  CHECK(g2.strides()[0] == 17u);
  CHECK(g2.flat({1, 2}) == 19u);

  CHECK_THROWS_AS(LogGrid::for_factor(RadialFactor{0.5, 1.0, 1}, 9), PreconditionError);
  CHECK_THROWS_AS(LogGrid::for_model(m, std::vector<int>{17}), DimensionError);
  CHECK_THROWS_AS(LogGrid::from_axes({}), DimensionError);
  CHECK_THROWS_AS(LogGrid::from_axes({GridAxis{0.0, 1.0, 2.0, 33}}), PreconditionError);
}

TEST_CASE("region membership") {
  const LogGrid g = LogGrid::for_model(make_model({{0.5, 1.0, 1}, {0.5, 1.0, 1}}), 33);
  const double inf = std::numeric_limits<double>::infinity();

  const RegionSpec lower = ALowerSet{{kLogHalf, inf}};
  CHECK(region_contains(lower, g, {16, 32}));
  CHECK(region_contains(lower, g, {0, 0}));
  CHECK_FALSE(region_contains(lower, g, {17, 0}));

  // Cross region over {01,10}: small at slot with bit 0.
  const RegionSpec cross =
      CrossRegion{CrossMatrix::parse_text("01\n10\n"), {kLogHalf, kLogHalf}};
  CHECK(region_contains(cross, g, {16, 32}));   // t1 <= cut (row 01)
  CHECK(region_contains(cross, g, {32, 16}));   // t2 <= cut (row 10)
  CHECK_FALSE(region_contains(cross, g, {17, 17}));

  const RegionSpec dom = DomainSublevel{nk_envelope(2, 1), 1.0};
  CHECK(region_contains(dom, g, {16, 16}));       // h = (0,0)
  CHECK_FALSE(region_contains(dom, g, {32, 16}));  // h = (1,0), sum not < 1
}

TEST_CASE("invariant: convex monotone obstacle is a fixed point up to rounding") {
  // Hull interpolation can round a candidate a last ulp below the obstacle
  // and the min-update then takes it, so the fixed point holds to 1e-12
  // (downward only: the no-overshoot invariant stays exact).
  const double tol = 1e-12;

  // 1-D: a clipped ramp is already convex and nondecreasing.
  const LogGrid g = LogGrid::for_factor(RadialFactor{0.5, 1.0, 1}, 33);
  GridFn obstacle{g, std::vector<double>(g.size()), std::vector<std::uint8_t>(g.size(), 1)};
  for (int i = 0; i < 33; ++i) obstacle.values[i] = g.h_at(0, i);
  const SolveResult res = convex_monotone_envelope(obstacle);
  CHECK(res.residual <= tol);
  for (int i = 0; i < 33; ++i) CHECK(std::abs(res.fn.values[i] - obstacle.values[i]) <= tol);

  // 2-D: max of the two per-axis ramps.
  const LogGrid g2 = LogGrid::for_model(default_model(2), 33);
  GridFn ob2{g2, std::vector<double>(g2.size()), std::vector<std::uint8_t>(g2.size(), 1)};
  std::vector<int> x(2, 0);
  std::size_t flat = 0;
  do {
    ob2.values[flat] = std::max(g2.h_at(0, x[0]), g2.h_at(1, x[1]));
    ++flat;
  } while (next_point(x, g2));
  const SolveResult res2 = convex_monotone_envelope(ob2);
  CHECK(res2.residual <= tol);
  flat = 0;
  for (; flat < g2.size(); ++flat)
    CHECK(std::abs(res2.fn.values[flat] - ob2.values[flat]) <= tol);
}

TEST_CASE("invariant: output never exceeds the obstacle") {
  const LogGrid g = LogGrid::for_model(default_model(2), 33);
  GridFn obstacle{g, std::vector<double>(g.size(), 1.0), std::vector<std::uint8_t>(g.size(), 1)};
  // Obstacle 0 on the lower-left quarter, 1 elsewhere: not convex, so the
  // solve genuinely moves values.
  std::vector<int> x(2, 0);
  std::size_t flat = 0;
  do {
    if (x[0] <= 16 && x[1] <= 16) obstacle.values[flat] = 0.0;
    ++flat;
  } while (next_point(x, g));
  const SolveResult res = convex_monotone_envelope(obstacle);
  for (flat = 0; flat < g.size(); ++flat) CHECK(res.fn.values[flat] <= obstacle.values[flat]);
  CHECK(min_constraint_slack(res.fn) >= -1e-9);

  // Idempotence: solving the solution again changes nothing beyond tol.
  const SolveResult again = convex_monotone_envelope(res.fn);
  double diff = 0.0;
  for (flat = 0; flat < g.size(); ++flat)
    diff = std::max(diff, std::abs(again.fn.values[flat] - res.fn.values[flat]));
  CHECK(diff <= 1e-6);
}

TEST_CASE("1-D disc solve matches the ramp formula") {
  const VerifyReport rep = verify_identity(IdentityParams{IdentityCase::DiscFormula, 0, 0, 0},
                                           default_model(1), 513, 5e-3);
  CHECK(rep.pass);
  CHECK(rep.max_dev <= 5e-3);
  CHECK(rep.case_name == "DISC_FORMULA");
  CHECK(rep.grid_pts == std::vector<int>{513});
  CHECK(rep.tolerance == 5e-3);
}

TEST_CASE("invariant: refinement does not lose accuracy on the disc") {
  const IdentityParams disc{IdentityCase::DiscFormula, 0, 0, 0};
  const double dev_coarse = verify_identity(disc, default_model(1), 33, 0.1).max_dev;
  const double dev_fine = verify_identity(disc, default_model(1), 65, 0.1).max_dev;
  const bool both_exact = dev_coarse <= 1e-10 && dev_fine <= 1e-10;
  CHECK((both_exact || dev_fine * 1.5 <= dev_coarse));
}

TEST_CASE("2-D bidisc product domain gives the max of the ramps") {
  const RadialModel m = default_model(2);
  const LogGrid g = LogGrid::for_model(m, 33);
  const RegionSpec a = ALowerSet{{kLogHalf, kLogHalf}};
  const RegionSpec dom = DomainSublevel{nk_envelope(2, 2), 1.0};
  const SolveResult res = compute_h_star(m, a, dom, g);
  CHECK(res.constraint_slack >= -1e-9);

  double max_dev = 0.0;
  std::vector<int> x(2, 0);
  std::size_t flat = 0;
  do {
    if (res.fn.mask[flat] && interior_point(res.fn, x)) {
      const double want = std::max(g.h_at(0, x[0]), g.h_at(1, x[1]));
      max_dev = std::max(max_dev, std::abs(res.fn.values[flat] - want));
    }
    ++flat;
  } while (next_point(x, g));
  CHECK(max_dev <= 2e-2);
}

TEST_CASE("invariant: solution dominates defining-family members from below") {
  // PROP_CENTER(2,1): the closed form is a member of the defining family, so
  // the computed envelope may not dip below it on interior points.
  const RadialModel m = default_model(2);
  const LogGrid g = LogGrid::for_model(m, 33);
  const IdentityParams c{IdentityCase::PropCenter, 2, 1, 0};
  const SolveResult res = compute_h_star(m, c.a_region(m), c.domain(), g);
  const HExpr rhs = c.rhs();

  double worst = 0.0;
  std::vector<int> x(2, 0);
  std::size_t flat = 0;
  do {
    if (res.fn.mask[flat] && interior_point(res.fn, x)) {
      const std::vector<double> h{g.h_at(0, x[0]), g.h_at(1, x[1])};
      worst = std::min(worst, res.fn.values[flat] - rhs.eval_d(h));
    }
    ++flat;
  } while (next_point(x, g));
  CHECK(worst >= -2e-2);
}

TEST_CASE("solver pins the subset form of the wide-gap layer extremal") {
  // Weight-1 layer cross inside the full three-factor product. The closed
  // form divides the full sum by two, but the extremal value is the subset
  // form max over |J| > 1 of (sum_J h - 1) / (min(|J|, 3) - 1); the solver
  // reproduces the subset form on the grid and sits strictly above the
  // closed form where a two-slot subset wins.
  const RadialModel m = default_model(3);
  const LogGrid g = LogGrid::for_model(m, 33);
  std::vector<double> cuts;
  for (const auto& f : m.factors) cuts.push_back(std::log(f.r));
  const RegionSpec a_reg = CrossRegion{layer_matrix(3, 1), cuts};
  const RegionSpec dom = DomainSublevel{nk_envelope(3, 3), 1.0};
  const SolveResult res = compute_h_star(m, a_reg, dom, g);

  const auto subset_form = [](const std::vector<double>& h) {
    double best = 0.0;
    for (int mask = 1; mask < 8; ++mask) {
      const int size = mask == 7 ? 3 : (mask == 1 || mask == 2 || mask == 4 ? 1 : 2);
      if (size <= 1) continue;
      double s = 0.0;
      for (int j = 0; j < 3; ++j)
        if (mask >> j & 1) s += h[static_cast<std::size_t>(j)];
      best = std::max(best, (s - 1.0) / (size - 1));
    }
    return best;
  };

  double dev = 0.0;
  std::vector<int> x(3, 0);
  std::size_t flat = 0;
  do {
    if (res.fn.mask[flat] && interior_point(res.fn, x)) {
      const std::vector<double> h{g.h_at(0, x[0]), g.h_at(1, x[1]), g.h_at(2, x[2])};
      dev = std::max(dev, std::abs(res.fn.values[flat] - subset_form(h)));
    }
    ++flat;
  } while (next_point(x, g));
  CHECK(dev <= 1e-9);

  const HExpr rule = rule_env_in_env(3, 1, 3);
  const std::vector<std::vector<double>> probes = {{0.75, 0.0, 0.6875}, {0.0, 0.8125, 0.8125}};
  for (const auto& h : probes) {
    std::vector<int> idx(3);
    for (int j = 0; j < 3; ++j)
      idx[j] = 16 + static_cast<int>(std::lround(16.0 * h[static_cast<std::size_t>(j)]));
    const double u = res.fn.values[g.flat(idx)];
    CHECK(u >= rule.eval_d(h) + 0.2);
    CHECK(std::abs(u - subset_form(h)) <= 1e-9);
  }
}

TEST_CASE("invariant: symmetric models give transposition-symmetric solutions") {
  const RadialModel m = default_model(2);
  const LogGrid g = LogGrid::for_model(m, 33);
  const IdentityParams c{IdentityCase::PropCenter, 2, 1, 0};
  const SolveResult res = compute_h_star(m, c.a_region(m), c.domain(), g);
  double asym = 0.0;
  for (int i = 0; i < 33; ++i)
    for (int j = 0; j < 33; ++j) {
      const std::size_t a = g.flat({i, j}), b = g.flat({j, i});
      if (res.fn.mask[a] && res.fn.mask[b])
        asym = std::max(asym, std::abs(res.fn.values[a] - res.fn.values[b]));
    }
  CHECK(asym <= 1e-9);
}

TEST_CASE("identity catalog runs clean under the smoke profile") {
  const auto catalog = identity_catalog();
  REQUIRE(catalog.size() == 9);
  CHECK(catalog[0].name() == "DISC_FORMULA");
  CHECK(catalog[1].name() == "PROP_CENTER(2,1)");
  CHECK(catalog[2].name() == "PROP_CENTER(2,2)");
  CHECK(catalog[3].name() == "PROP_CENTER(3,2)");
  CHECK(catalog[4].name() == "ENV_IN_ENV(2,1,2)");
  CHECK(catalog[5].name() == "ENV_IN_ENV(3,1,2)");
  CHECK(catalog[6].name() == "ENV_IN_ENV(3,2,3)");
  CHECK(catalog[7].name() == "CLAIM_Q6");
  CHECK(catalog[8].name() == "CLAIM_Q7");

  const RadialModel m = default_model(3);
  for (const auto& c : catalog) {
    const int pts = profile_points(Profile::Smoke, c.dims());
    const double tol = profile_tolerance(Profile::Smoke, c.dims());
    const VerifyReport rep = verify_identity(c, m, pts, tol);
    INFO(rep.case_name, " max_dev=", rep.max_dev);
    CHECK(rep.pass);
    CHECK(rep.max_dev <= tol);
    CHECK(rep.sweeps > 0);
    CHECK(rep.residual <= 1e-7);
  }
}

TEST_CASE("skewed models pass the smoke catalog too") {
  const RadialModel m =
      make_model({{0.31, 1.1, 1}, {0.57, 0.9, 2}, {0.72, 1.3, 1}});
  for (const auto& c : identity_catalog()) {
    const VerifyReport rep =
        verify_identity(c, m, 33, profile_tolerance(Profile::Smoke, c.dims()));
    INFO(rep.case_name, " max_dev=", rep.max_dev);
    CHECK(rep.pass);
  }
}

TEST_CASE("a-region equal to the domain gives the zero function") {
  const RadialModel m = default_model(2);
  const LogGrid g = LogGrid::for_model(m, 33);
  const RegionSpec dom = DomainSublevel{nk_envelope(2, 1), 1.0};
  const SolveResult res = compute_h_star(m, dom, dom, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (res.fn.mask[i]) CHECK(res.fn.values[i] == 0.0);
}

TEST_CASE("solver slack is reported for locator solves") {
  const RadialModel m = default_model(2);
  const IdentityParams c{IdentityCase::ClaimQ6, 0, 0, 0};
  const SolveResult res =
      compute_h_star(m, c.a_region(m), c.domain(), LogGrid::for_model(m, 33));
  CHECK(res.constraint_slack >= -1e-9);
  CHECK(res.sweeps >= 1);
}

TEST_CASE("degenerate and inconsistent regions are rejected") {
  const RadialModel m = default_model(2);
  const LogGrid g = LogGrid::for_model(m, 33);
  // A-region below the grid: no masked zero point anywhere.
  const RegionSpec empty_a = ALowerSet{{g.axis(0).t_min - 1.0, g.axis(1).t_min - 1.0}};
  const RegionSpec dom = DomainSublevel{nk_envelope(2, 1), 1.0};
  CHECK_THROWS_AS(compute_h_star(m, empty_a, dom, g), DegenerateSetError);

  // A-region reaching strictly beyond the domain.
  const double inf = std::numeric_limits<double>::infinity();
  const RegionSpec huge_a = ALowerSet{{inf, inf}};
  CHECK_THROWS_AS(compute_h_star(m, huge_a, dom, g), PreconditionError);

  // Model/grid dimension mismatch.
  CHECK_THROWS_AS(compute_h_star(default_model(3), empty_a, dom, g), DimensionError);
}

TEST_CASE("identity parameter validation") {
  const RadialModel m = default_model(3);
  CHECK_THROWS_AS(verify_identity(IdentityParams{IdentityCase::PropCenter, 2, 3, 0}, m, 33, 0.1),
                  PreconditionError);
  CHECK_THROWS_AS(verify_identity(IdentityParams{IdentityCase::EnvInEnv, 3, 2, 2}, m, 33, 0.1),
                  PreconditionError);
  CHECK_THROWS_AS(verify_identity(IdentityParams{IdentityCase::PropCenter, 4, 1, 0}, m, 33, 0.1),
                  PreconditionError);
  CHECK_THROWS_AS(verify_identity(IdentityParams{IdentityCase::ClaimQ7, 0, 0, 0},
                                  make_model({{0.5, 1.0, 1}, {0.5, 1.0, 1}}), 33, 0.1),
                  DimensionError);
}

TEST_CASE("profiles") {
  CHECK(profile_points(Profile::Smoke, 3) == 33);
  CHECK(profile_points(Profile::Desk, 1) == 513);
  CHECK(profile_points(Profile::Desk, 2) == 129);
  CHECK(profile_points(Profile::Desk, 3) == 65);
  CHECK(profile_points(Profile::Deep, 3) == 129);
  CHECK(profile_tolerance(Profile::Desk, 1) == 5e-3);
  CHECK(profile_tolerance(Profile::Desk, 2) == 2e-2);
  CHECK(profile_tolerance(Profile::Desk, 3) == 3e-2);
  CHECK(parse_profile("smoke") == Profile::Smoke);
  CHECK(parse_profile("desk") == Profile::Desk);
  CHECK(parse_profile("deep") == Profile::Deep);
  CHECK_THROWS_AS(parse_profile("bogus"), ParseError);
}

TEST_CASE("grid function csv export") {
  GridAxis ax{-2.0, 0.0, -0.7, 17};
  const LogGrid g = LogGrid::from_axes({ax});
  GridFn f{g, std::vector<double>(g.size(), 0.25), std::vector<std::uint8_t>(g.size(), 1)};
  f.mask[16] = 0;
  std::ostringstream os;
  export_csv(f, os);
  const std::string text = os.str();
  CHECK(text.substr(0, text.find('\n')) == "t_1,value,mask");
  CHECK(text.find(",0.25,1") != std::string::npos);
  CHECK(text.find(",0.25,0") != std::string::npos);
  // One line per grid point plus the header.
  CHECK(std::count(text.begin(), text.end(), '\n') == 18);
}
