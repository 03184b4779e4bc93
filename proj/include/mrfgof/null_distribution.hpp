#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mrfgof/conclique.hpp"
#include "mrfgof/gibbs.hpp"
#include "mrfgof/residuals.hpp"

namespace mrfgof {

// Covariance of the limit of (W_1, W_2) for the conditional Gaussian
// four-nearest-neighbor model with its two-conclique cover:
//   j == k : 2 (min(u,v) - uv)
//   j != k : 8 [P(X1 <= Phi^-1(u), X2 <= Phi^-1(v)) - uv], corr(X1, X2) = -eta,
// and 0 whenever u or v is 0 or 1. Conclique indices are 0-based.
double limit_cov_g4(double u, double v, std::size_t j, std::size_t k, double eta);

// Monte Carlo estimate of the cross-conclique limit covariance for an
// arbitrary model: the pair probabilities P[U(0) <= u, U(lag) <= v] are
// estimated from residual pairs of simulated fields, for every lag
// a_l - a_i + Delta s that lies in +-M. Other lags contribute exactly zero and
// are never enumerated.
class MonteCarloCrossCovariance {
 public:
  struct LagTerm {
    std::size_t group_j, group_k;   // conclique groups, j < k
    std::size_t basic_i, basic_l;   // basic conclique indices
    LatticePoint lag;
    std::vector<float> first, second;          // residual pairs, all fields
    std::vector<std::size_t> field_start;      // pair offset of each field (+ end)
  };

  struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
  };

  struct Options {
    int mc_fields = 2000;
    int min_fields = 100;
    GibbsOptions gibbs{500, 10, 0, SweepOrder::conclique};
  };

  // Residuals are taken at interior sites only, where the conditional uses
  // the complete neighborhood.
  MonteCarloCrossCovariance(const MrfModel& model, const ConcliqueCover& cover,
                            std::span<const GridData> fields, RandomStream& rng, int min_fields = 100);

  static MonteCarloCrossCovariance simulate(const MrfModel& model, const SamplingWindow& window,
                                            const ConcliqueCover& cover, const Options& options,
                                            RandomStream& rng);

  std::size_t q() const { return group_sizes_.size(); }
  int det_delta() const { return det_delta_; }
  const std::vector<std::size_t>& group_sizes() const { return group_sizes_; }
  const std::vector<LagTerm>& terms() const { return terms_; }
  std::size_t n_fields() const { return n_fields_; }

  // Exact Brownian-bridge diagonal for j == k; Monte Carlo mean and standard
  // error (across fields) otherwise.
  Estimate covariance(double u, double v, std::size_t j, std::size_t k) const;

  // Off-diagonal block (j != k) on a grid, from pooled pair frequencies.
  Eigen::MatrixXd cross_block(const Eigen::VectorXd& grid, std::size_t j, std::size_t k) const;

 private:
  std::vector<LagTerm> terms_;
  std::vector<std::size_t> group_sizes_;
  int det_delta_ = 1;
  std::size_t n_fields_ = 0;
};

// Thin functional form of MonteCarloCrossCovariance::covariance.
MonteCarloCrossCovariance::Estimate limit_cov_generic(const MonteCarloCrossCovariance& mc, double u,
                                                      double v, std::size_t j, std::size_t k);

// Covariance structure of the limit vector process.
struct LimitCovarianceSpec {
  enum class Kind {
    gaussian_four_nearest,  // closed form, two concliques
    generic_monte_carlo,    // MonteCarloCrossCovariance
    independent,            // zero cross-covariance (q Brownian bridges)
  };

  Kind kind = Kind::independent;
  double eta = 0.0;
  std::shared_ptr<const MonteCarloCrossCovariance> monte_carlo;
  std::size_t q = 1;
  int det_delta = 1;
  std::vector<std::size_t> group_sizes{1};

  static LimitCovarianceSpec gaussian_four_nearest(double eta);
  static LimitCovarianceSpec generic(std::shared_ptr<const MonteCarloCrossCovariance> mc);
  static LimitCovarianceSpec independent(int det_delta, std::vector<std::size_t> group_sizes);

  // det(Delta) / |J_j|: the Brownian-bridge scale of component j.
  double bridge_scale(std::size_t j) const;
};

double limit_covariance(const LimitCovarianceSpec& spec, double u, double v, std::size_t j, std::size_t k);

// (qG x qG) covariance of (W_1(u_1..u_G), ..., W_q(u_1..u_G)).
Eigen::MatrixXd limit_covariance_matrix(const LimitCovarianceSpec& spec, const Eigen::VectorXd& grid);

struct NullSimulationOptions {
  int grid_size = 512;       // G interior points u_i = i / (G + 1)
  int replicates = 20000;    // R
  double r = 2.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Sample the sup between grid nodes from the conditional Brownian-bridge
  // maximum instead of taking the max over nodes only.
  bool bridge_sup = true;
  std::vector<double> levels{0.90, 0.95, 0.99};
};

struct NullQuantileTable {
  std::array<std::vector<double>, 4> draws;
  std::vector<double> levels;
  std::array<std::vector<double>, 4> quantiles;  // quantiles[f][level index]
  NullSimulationOptions config;
  double jitter = 0.0;            // diagonal jitter used by the factorization
  bool eigen_clipped = false;     // factor came from a clipped eigendecomposition

  // Type-7 quantile of functional f (0-based) at an arbitrary level.
  double quantile(std::size_t f, double level) const;
};

// Throws ConfigError for G < 64 or R < 100, NumericalError when the
// covariance cannot be factorized within the jitter budget.
NullQuantileTable simulate_null_quantiles(const LimitCovarianceSpec& spec,
                                          const NullSimulationOptions& options);

// p_f = (1 + #{draws >= observed_f}) / (R + 1).
std::array<double, 4> p_value(const GofStatistics& observed, const NullQuantileTable& table);

// Linear interpolation between order statistics (R's type 7).
double quantile_type7(std::vector<double> sample, double level);
double quantile_type7_sorted(std::span<const double> sorted, double level);

// sup_t |F_a(t) - F_b(t)| over the pooled jump points.
double ks_distance(std::span<const double> a, std::span<const double> b);
// [ integral (F_a - F_b)^2 dt ]^(1/2), exact for step functions.
double cm_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mrfgof
