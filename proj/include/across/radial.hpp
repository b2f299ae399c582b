#pragma once

#include <string>
#include <vector>

#include "across/hexpr.hpp"

namespace across {

// Rotation-invariant factor: the small set is the closed ball of radius r,
// the big set the open ball of radius R, both centered at 0 in C^dim. The
// radial profile depends only on |z|, so dim is carried for bookkeeping.
struct RadialFactor {
  double r = 0.0;
  double R = 0.0;
  int dim = 1;
};

struct RadialModel {
  std::vector<RadialFactor> factors;
  int size() const { return static_cast<int>(factors.size()); }
};

// Validates 0 < r < R on every factor and at least two factors.
RadialModel make_model(std::vector<RadialFactor> factors);

// Parses {"factors":[{"r":0.5,"R":2.0,"dim":1}, ...]}; dim defaults to 1.
RadialModel parse_model_json(const std::string& text);

// Extremal function of the ball pair at radius rho >= 0:
// 0 for rho <= r, log(rho/r)/log(R/r) for r < rho < R.
// Throws EvalDomainError for rho < 0 and OutsideDomainError (carrying
// factor_index) for rho >= R.
double h_disc(const RadialFactor& f, double rho, int factor_index = 1);

// Componentwise h_disc; radii.size() must match the model.
std::vector<double> h_vector(const RadialModel& model, const std::vector<double>& radii);

// True iff the point with the given factor radii lies in the set described
// by expr, i.e. expr(h_vector) < 1.
bool membership(const RadialModel& model, const std::vector<double>& radii, const HExpr& expr);

}  // namespace across
