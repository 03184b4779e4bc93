#pragma once

#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mrfgof/grid_data.hpp"
#include "mrfgof/models.hpp"

namespace mrfgof {

// Neighbor incidence H over the observed sites of a window (rows follow
// observed_indices()). Neighbors are the observed cells among s + M, so sites
// near the edge or the mask simply have fewer of them. periodic=true wraps the
// box into a torus.
struct NeighborIncidence {
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // empty unless requested

  static NeighborIncidence build(const SamplingWindow& window, const NeighborhoodTemplate& m,
                                 bool periodic = false, bool with_vectors = true);

  Eigen::Index size() const { return h.rows(); }
  bool is_zero() const { return h.nonZeros() == 0; }
};

struct EtaSpace {
  double lower = 0.0;
  double upper = 0.0;
  bool unbounded = false;

  bool contains(double eta) const { return eta > lower && eta < upper; }
};

// (1/lambda_min, 1/lambda_max). For H = 0 the sentinel interval is returned
// with unbounded = true.
EtaSpace eta_parameter_space(const NeighborIncidence& h, double sentinel = 1e6);

// log N(y; alpha 1, (I - eta H)^-1 tau2) with y the observed values.
double log_likelihood_gaussian(const GridData& data, double alpha, double eta, double tau2,
                               const NeighborIncidence& h);

enum class FitMethod { ml, pseudolikelihood };
FitMethod parse_fit_method(const std::string& s);
std::string to_string(FitMethod m);

struct FitResult {
  double alpha = 0.0;
  double eta = 0.0;
  double tau2 = 1.0;
  // Gaussian log-likelihood for ml, log pseudo-likelihood otherwise.
  double log_likelihood = 0.0;
  EtaSpace eta_bounds;
  FitMethod method = FitMethod::ml;
  bool boundary = false;
  std::string warning;

  GaussianMrf params() const { return {alpha, eta, tau2}; }
};

// Profile likelihood maximizer that keeps the spectral decomposition of H so
// many datasets on one window can be fitted cheaply.
class GaussianMlFitter {
 public:
  GaussianMlFitter(const SamplingWindow& window, const NeighborhoodTemplate& m);

  FitResult fit(const GridData& data) const;
  FitResult fit(const Eigen::VectorXd& observed) const;

  // Profile log-likelihood at eta with alpha and tau2 maximized out.
  double profile(const Eigen::VectorXd& z, const Eigen::VectorXd& w, double eta,
                 double* alpha = nullptr, double* tau2 = nullptr) const;

  const NeighborIncidence& incidence() const { return h_; }
  const EtaSpace& space() const { return space_; }

 private:
  SamplingWindow window_;
  NeighborIncidence h_;
  EtaSpace space_;
  Eigen::VectorXd w_;  // V^T 1
};

inline constexpr Eigen::Index kMaxMlSites = 5000;

FitResult fit_ml(const GridData& data, const NeighborhoodTemplate& m, EdgeRule edge_rule);
// Besag pseudo-likelihood of the conditional Gaussian over the residual sites
// selected by edge_rule.
FitResult fit_pseudolikelihood(const GridData& data, const NeighborhoodTemplate& m, EdgeRule edge_rule);
// ml, falling back to pseudolikelihood (with a warning) above kMaxMlSites.
FitResult fit_gaussian(const GridData& data, const NeighborhoodTemplate& m, EdgeRule edge_rule,
                       FitMethod method);

}  // namespace mrfgof
