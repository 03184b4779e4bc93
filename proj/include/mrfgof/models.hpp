#pragma once

#include <span>
#include <string>
#include <variant>

#include "mrfgof/lattice.hpp"
#include "mrfgof/random.hpp"

namespace mrfgof {

// Which sites produce residuals: interior_only uses the sites whose whole
// neighborhood is observed; truncated_neighbors uses every observed site with
// whatever neighbors are observed.
enum class EdgeRule { interior_only, truncated_neighbors };

EdgeRule parse_edge_rule(const std::string& s);
std::string to_string(EdgeRule r);

// Conditional Gaussian: Y(s) | rest ~ N(alpha + eta * sum (y(t) - alpha), tau2).
struct GaussianMrf {
  double alpha = 0.0;
  double eta = 0.0;
  double tau2 = 1.0;
};

// Autologistic: logit P(Y(s) = 1 | rest) = kappa + eta * sum y(t), y in {0, 1}.
struct AutologisticMrf {
  double kappa = 0.0;
  double eta = 0.0;
};

using ModelParams = std::variant<GaussianMrf, AutologisticMrf>;

// A conditional family bound to its neighborhood template.
struct MrfModel {
  ModelParams params;
  NeighborhoodTemplate neighborhood;

  bool is_continuous() const { return std::holds_alternative<GaussianMrf>(params); }
  std::string family() const;
  // Throws ConfigError on tau2 <= 0 or non-finite parameters.
  void validate() const;
};

double conditional_mean_gaussian(const GaussianMrf& g, std::span<const double> neighbor_values);
double success_probability(const AutologisticMrf& b, std::span<const double> neighbor_values);

// F(y | neighbors).
double conditional_cdf(const MrfModel& model, double y, std::span<const double> neighbor_values);
// F^-(y | neighbors) = P(Y < y | neighbors).
double conditional_cdf_left(const MrfModel& model, double y, std::span<const double> neighbor_values);
double conditional_sample(const MrfModel& model, std::span<const double> neighbor_values,
                          RandomStream& rng);

}  // namespace mrfgof
