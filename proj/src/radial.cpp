#include "across/radial.hpp"

#include <cmath>

#include <json.hpp>

#include "across/errors.hpp"

namespace across {

RadialModel make_model(std::vector<RadialFactor> factors) {
  if (factors.size() < 2) throw DimensionError("model needs at least two factors");
  for (std::size_t j = 0; j < factors.size(); ++j) {
    const RadialFactor& f = factors[j];
    if (!(f.r > 0.0) || !(f.R > f.r) || !std::isfinite(f.R))
      throw PreconditionError("factor " + std::to_string(j + 1) + ": need 0 < r < R < inf");
    if (f.dim < 1)
      throw PreconditionError("factor " + std::to_string(j + 1) + ": dim must be >= 1");
  }
  return RadialModel{std::move(factors)};
}

RadialModel parse_model_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array())
    throw ParseError("model json: expected an object with a \"factors\" array");
  std::vector<RadialFactor> factors;
  for (const auto& jf : j["factors"]) {
    if (!jf.is_object() || !jf.contains("r") || !jf.contains("R"))
      throw ParseError("model json: each factor needs numeric \"r\" and \"R\"");
    RadialFactor f;
    try {
      f.r = jf.at("r").get<double>();
      f.R = jf.at("R").get<double>();
      f.dim = jf.value("dim", 1);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("model json: ") + e.what());
    }
    factors.push_back(f);
  }
  return make_model(std::move(factors));
}

double h_disc(const RadialFactor& f, double rho, int factor_index) {
  if (!(rho >= 0.0))
    throw EvalDomainError("radius must be a nonnegative number");
  if (rho >= f.R)
    throw OutsideDomainError(
        "radius " + std::to_string(rho) + " reaches the outer radius of factor " +
            std::to_string(factor_index),
        factor_index);
  if (rho <= f.r) return 0.0;
  return std::log(rho / f.r) / std::log(f.R / f.r);
}

std::vector<double> h_vector(const RadialModel& model, const std::vector<double>& radii) {
  if (static_cast<int>(radii.size()) != model.size())
    throw DimensionError("radii count does not match the model");
  std::vector<double> h(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j)
    h[j] = h_disc(model.factors[j], radii[j], static_cast<int>(j) + 1);
  return h;
}

bool membership(const RadialModel& model, const std::vector<double>& radii, const HExpr& expr) {
  std::vector<double> h = h_vector(model, radii);
  if (expr.max_var() > model.size())
    throw DimensionError("expression uses more variables than the model has factors");
  return expr.eval_d(h) < 1.0;
}

}  // namespace across
