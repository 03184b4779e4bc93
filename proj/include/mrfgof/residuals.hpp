#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mrfgof/conclique.hpp"
#include "mrfgof/grid_data.hpp"
#include "mrfgof/models.hpp"

namespace mrfgof {

// Equispaced evaluation points on [0, 1], endpoints included.
Eigen::VectorXd default_u_grid(Eigen::Index points = 1024);

// Generalized residuals grouped by conclique. cells[j][i] is the window cell
// that produced per_conclique[j][i]; n_total is N = sum_j |C_jN|.
struct ResidualSet {
  std::vector<std::vector<double>> per_conclique;
  std::vector<std::vector<std::size_t>> cells;
  std::size_t n_total = 0;
  Eigen::VectorXd u_grid;

  std::size_t q() const { return per_conclique.size(); }
};

// One Uniform(0,1) auxiliary variate per observed cell, drawn in lexicographic
// order; unobserved cells hold NaN.
std::vector<double> draw_a_field(const SamplingWindow& window, RandomStream& rng);

// Randomized PIT U(s) = (1 - A(s)) F(y(s) | nbrs) + A(s) F^-(y(s) | nbrs).
// Residual sites follow the edge rule; the conditional at each site uses its
// observed neighbors.
ResidualSet generalized_residuals(const GridData& data, const MrfModel& model,
                                  const ConcliqueCover& cover, EdgeRule edge_rule,
                                  std::span<const double> a_field,
                                  const Eigen::VectorXd& u_grid = default_u_grid());

ResidualSet generalized_residuals(const GridData& data, const MrfModel& model,
                                  const ConcliqueCover& cover, EdgeRule edge_rule,
                                  RandomStream& rng,
                                  const Eigen::VectorXd& u_grid = default_u_grid());

// W_jN(u) = sqrt(N) (G_jN(u) - u) on the residual grid. The sorted residuals
// are kept so sup statistics can be evaluated exactly at the jumps.
struct EmpiricalProcessSet {
  std::vector<Eigen::VectorXd> w;
  std::vector<std::vector<double>> sorted_residuals;
  Eigen::VectorXd u_grid;
  std::size_t n_total = 0;

  std::size_t q() const { return w.size(); }
};

// Throws DataError naming the first empty conclique.
EmpiricalProcessSet empirical_process(const ResidualSet& residuals);

struct GofStatistics {
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  double r = 2.0;

  double operator[](std::size_t i) const;
};

// Combine per-conclique sup norms and integrals of |W_j|^r into the four
// pooled statistics (max / root-mean-square of sups, max / mean of L^r norms).
GofStatistics combine_functionals(std::span<const double> sups, std::span<const double> integrals,
                                  double r);

// Exact sup over [0,1] via the jump points; trapezoidal integrals on u_grid.
// Throws ConfigError for r < 1.
GofStatistics compute_statistics(const EmpiricalProcessSet& processes, double r = 2.0);

// sup_u |G_n(u) - u| for a sample in [0,1] (unscaled KS distance).
double ks_uniform_distance(std::vector<double> sample);

}  // namespace mrfgof
