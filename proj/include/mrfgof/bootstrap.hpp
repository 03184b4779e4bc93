#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>

#include "mrfgof/conclique.hpp"
#include "mrfgof/estimation.hpp"
#include "mrfgof/residuals.hpp"

namespace mrfgof {

// fresh: new A(s) draws for the observed data and for every replicate.
// fixed: one A-field reused throughout.
enum class AFieldMode { fresh, fixed };
AFieldMode parse_a_field_mode(const std::string& s);
std::string to_string(AFieldMode m);

struct BootstrapConfig {
  int B = 5000;
  int burn_in = 500;
  int spacing = 10;
  std::uint64_t seed = 1;
  FitMethod refit_method = FitMethod::ml;
  AFieldMode a_field_mode = AFieldMode::fresh;
  EdgeRule edge_rule = EdgeRule::truncated_neighbors;
  double level = 0.95;  // percentile interval coverage
  double r = 2.0;
  int u_grid_points = 1024;
  double max_drop_fraction = 0.05;
  unsigned threads = 1;

  // Throws ConfigError on B < 1, burn_in < 0, spacing < 1 or bad levels.
  void validate() const;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  std::array<double, 4> p_values{};
  GofStatistics observed;
  FitResult fit;
  Eigen::MatrixXd replicate_stats;   // kept replicates x 4
  Eigen::MatrixXd parameter_draws;   // kept replicates x 3 (alpha, eta, tau2)
  std::array<Interval, 3> intervals; // alpha, eta, tau2
  int dropped = 0;
  int kept = 0;
};

// Parametric bootstrap calibration of T1..T4 for the conditional Gaussian
// family with estimated parameters. Replicate fields come from one Gibbs
// chain under the fitted model; each is refitted and re-tested.
BootstrapResult composite_test(const GridData& data, const NeighborhoodTemplate& m,
                               const ConcliqueCover& cover, const BootstrapConfig& config);

// Type-7 quantiles at (1 - level)/2 and (1 + level)/2.
Interval percentile_interval(std::span<const double> draws, double level);

}  // namespace mrfgof
