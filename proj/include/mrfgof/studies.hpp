#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mrfgof/null_distribution.hpp"

namespace mrfgof {

// Simulation studies for the Gaussian four-nearest model on side x side
// windows (N = side^2 sites, alpha = 0, tau2 = 1). Fields come from Gibbs
// chains of chain_length fields each; chain c of a cell uses its own stream,
// so results do not depend on the thread count.
struct StudyOptions {
  std::vector<double> etas{0.0, 0.1, 0.24};
  std::vector<int> sides{10, 30};
  int replicates = 5000;
  int burn_in = 500;
  int spacing = 10;
  int chain_length = 250;
  NullSimulationOptions null;  // G, R, r and levels for the limit tables
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

// T1..T4 for `replicates` fields simulated with eta and tested at
// (alpha, eta_test, tau2) = (0, eta_test, 1), residuals over all N sites.
std::array<std::vector<double>, 4> finite_sample_statistics(double eta, double eta_test, int side,
                                                            const StudyOptions& options,
                                                            std::uint64_t seed);

struct Table1Row {
  double eta;
  int n_sites;
  int functional;  // 1..4
  double level;
  double proportion;
  double mc_se;
};
std::vector<Table1Row> study_table1(const StudyOptions& options);

struct DistanceRow {
  double eta;
  int n_sites;
  int functional;
  std::string comparison;  // "finite-vs-limit" or "limit-vs-limit" (noise floor)
  double d_ks;
  double d_cm;
};
std::vector<DistanceRow> study_distance(const StudyOptions& options);

struct PowerRow {
  double eta;  // alternative
  int n_sites;
  int functional;
  double gamma;
  double power;
};
// Null: eta = eta_null. Alternatives: options.etas.
std::vector<PowerRow> study_power(const StudyOptions& options, const std::vector<double>& gammas,
                                  double eta_null = 0.0);

}  // namespace mrfgof
