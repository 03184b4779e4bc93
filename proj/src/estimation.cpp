#include "mrfgof/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "mrfgof/conclique.hpp"
#include "mrfgof/errors.hpp"

namespace mrfgof {

NeighborIncidence NeighborIncidence::build(const SamplingWindow& window, const NeighborhoodTemplate& m,
                                           bool periodic, bool with_vectors) {
  const NeighborTable table(window, m, periodic);
  const auto cells = window.observed_indices();
  std::vector<Eigen::Index> row_of(window.size(), -1);
  for (std::size_t i = 0; i < cells.size(); ++i) row_of[cells[i]] = static_cast<Eigen::Index>(i);

  const auto n = static_cast<Eigen::Index>(cells.size());
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t t : table.neighbors(cells[i])) {
      if (t == cells[i]) continue;
      trips.emplace_back(static_cast<Eigen::Index>(i), row_of[t], 1.0);
      trips.emplace_back(row_of[t], static_cast<Eigen::Index>(i), 1.0);
    }
  }
  NeighborIncidence out;
  out.h.resize(n, n);
  // Duplicates (both directions of a symmetric pair, or wrap-around on a
  // narrow torus) collapse to a single 1.
  out.h.setFromTriplets(trips.begin(), trips.end(), [](double, double) { return 1.0; });
  out.h.makeCompressed();

  const Eigen::MatrixXd dense(out.h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      dense, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of H failed");
  out.eigenvalues = es.eigenvalues();
  if (with_vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

EtaSpace eta_parameter_space(const NeighborIncidence& h, double sentinel) {
  if (h.is_zero()) return {-sentinel, sentinel, true};
  const double lmin = h.eigenvalues.minCoeff();
  const double lmax = h.eigenvalues.maxCoeff();
  EtaSpace s;
  s.lower = lmin < 0.0 ? 1.0 / lmin : -sentinel;
  s.upper = lmax > 0.0 ? 1.0 / lmax : sentinel;
  return s;
}

double log_likelihood_gaussian(const GridData& data, double alpha, double eta, double tau2,
                               const NeighborIncidence& h) {
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw ConfigError("tau2 must be positive");
  const Eigen::VectorXd y = data.observed_values();
  if (y.size() != h.size()) throw ConfigError("data do not match the incidence matrix");
  if (!eta_parameter_space(h).contains(eta)) {
    throw ConfigError("eta = " + std::to_string(eta) + " is outside the parameter space");
  }
  const auto n = static_cast<double>(y.size());
  const Eigen::VectorXd e = y.array() - alpha;
  const Eigen::VectorXd prec_e = e - eta * (h.h * e);
  const double quad = e.dot(prec_e) / tau2;
  const double logdet = (1.0 - eta * h.eigenvalues.array()).log().sum();
  return -0.5 * n * std::log(2.0 * std::numbers::pi * tau2) + 0.5 * logdet - 0.5 * quad;
}

FitMethod parse_fit_method(const std::string& s) {
  if (s == "ml") return FitMethod::ml;
  if (s == "pseudolikelihood" || s == "pl") return FitMethod::pseudolikelihood;
  throw ConfigError("unknown fit method '" + s + "'");
}

std::string to_string(FitMethod m) { return m == FitMethod::ml ? "ml" : "pseudolikelihood"; }

// --- ML -------------------------------------------------------------------------

namespace {

constexpr double kShrink = 1e-9;
constexpr double kEtaTol = 1e-6;
constexpr int kPrescan = 50;

void require_finite(const Eigen::VectorXd& y) {
  if (y.size() < 2) throw DataError("fitting needs at least two observed sites");
  if (!y.allFinite()) throw DataError("data contain non-finite values");
}

template <typename F>
double golden_max(F&& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kEtaTol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

// Maximizes f on [lo, hi]: a coarse scan picks the bracket, golden section
// refines it. Returns the better of the refined point and the best node.
template <typename F>
double maximize_1d(F&& f, double lo, double hi) {
  double best_x = lo, best_f = -std::numeric_limits<double>::infinity();
  int best_k = 0;
  const double step = (hi - lo) / (kPrescan - 1);
  for (int k = 0; k < kPrescan; ++k) {
    const double x = k == kPrescan - 1 ? hi : lo + k * step;
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
      best_k = k;
    }
  }
  const double a = best_k == 0 ? lo : lo + (best_k - 1) * step;
  const double b = best_k == kPrescan - 1 ? hi : lo + (best_k + 1) * step;
  const double x = golden_max(f, a, std::min(b, hi));
  return f(x) >= best_f ? x : best_x;
}

}  // namespace

GaussianMlFitter::GaussianMlFitter(const SamplingWindow& window, const NeighborhoodTemplate& m)
    : window_(window), h_(NeighborIncidence::build(window, m)), space_(eta_parameter_space(h_)) {
  if (h_.is_zero()) throw ConfigError("no two observed sites are neighbors; eta is not identifiable");
  w_ = h_.eigenvectors.transpose() * Eigen::VectorXd::Ones(h_.size());
}

double GaussianMlFitter::profile(const Eigen::VectorXd& z, const Eigen::VectorXd& w, double eta,
                                 double* alpha, double* tau2) const {
  const Eigen::ArrayXd d = 1.0 - eta * h_.eigenvalues.array();
  const double a = (d * w.array() * z.array()).sum() / (d * w.array().square()).sum();
  const double n = static_cast<double>(z.size());
  const double t2 = (d * (z.array() - a * w.array()).square()).sum() / n;
  if (alpha) *alpha = a;
  if (tau2) *tau2 = t2;
  if (!(t2 > 0.0)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * t2) + 1.0) + 0.5 * d.log().sum();
}

FitResult GaussianMlFitter::fit(const GridData& data) const {
  if (data.window.mask() != window_.mask() || data.window.size() != window_.size()) {
    throw ConfigError("data window differs from the fitter window");
  }
  return fit(data.observed_values());
}

FitResult GaussianMlFitter::fit(const Eigen::VectorXd& y) const {
  require_finite(y);
  if (y.size() != h_.size()) throw ConfigError("data length does not match the window");
  if (y.maxCoeff() == y.minCoeff()) throw NumericalError("constant data: residual variance is zero");
  const Eigen::VectorXd z = h_.eigenvectors.transpose() * y;
  const double lo = space_.lower + kShrink, hi = space_.upper - kShrink;
  const double eta = maximize_1d([&](double e) { return profile(z, w_, e); }, lo, hi);

  FitResult r;
  r.method = FitMethod::ml;
  r.eta = eta;
  r.log_likelihood = profile(z, w_, eta, &r.alpha, &r.tau2);
  if (!(r.tau2 > 0.0) || !std::isfinite(r.log_likelihood)) {
    throw NumericalError("maximum likelihood fit degenerated (zero residual variance)");
  }
  r.eta_bounds = space_;
  r.boundary = eta - lo < 2.0 * kEtaTol || hi - eta < 2.0 * kEtaTol;
  return r;
}

FitResult fit_ml(const GridData& data, const NeighborhoodTemplate& m, EdgeRule) {
  require_finite(data.observed_values());
  if (static_cast<Eigen::Index>(data.window.n_observed()) > kMaxMlSites) {
    throw ConfigError("maximum likelihood is limited to " + std::to_string(kMaxMlSites) + " sites");
  }
  return GaussianMlFitter(data.window, m).fit(data);
}

// --- pseudo-likelihood ---------------------------------------------------------

FitResult fit_pseudolikelihood(const GridData& data, const NeighborhoodTemplate& m, EdgeRule edge_rule) {
  require_finite(data.observed_values());
  const NeighborTable table(data.window, m);
  std::vector<double> y, s, k;
  for (std::size_t c : data.window.observed_indices()) {
    if (edge_rule == EdgeRule::interior_only && !table.interior(c)) continue;
    double sum = 0.0;
    for (std::size_t t : table.neighbors(c)) sum += data[t];
    y.push_back(data[c]);
    s.push_back(sum);
    k.push_back(static_cast<double>(table.neighbors(c).size()));
  }
  const std::size_t n = y.size();
  if (n < 3) throw DataError("pseudo-likelihood needs at least three sites");

  // Conditional mean alpha + eta (S - alpha k); minimize the residual sum of
  // squares by alternating the two closed-form coordinate updates.
  double alpha = 0.0;
  for (double v : y) alpha += v;
  alpha /= static_cast<double>(n);
  double eta = 0.0;
  auto rss = [&](double a, double e) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - a - e * (s[i] - a * k[i]);
      r += d * d;
    }
    return r;
  };
  double prev = rss(alpha, eta);
  for (int it = 0; it < 10000; ++it) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = s[i] - alpha * k[i];
      num += x * (y[i] - alpha);
      den += x * x;
    }
    if (!(den > 0.0)) throw NumericalError("singular pseudo-likelihood design");
    eta = num / den;
    num = den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = 1.0 - eta * k[i];
      num += x * (y[i] - eta * s[i]);
      den += x * x;
    }
    if (!(den > 0.0)) throw NumericalError("singular pseudo-likelihood design");
    alpha = num / den;
    const double cur = rss(alpha, eta);
    if (prev - cur <= 1e-14 * std::max(1.0, prev)) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  const double tau2 = prev / static_cast<double>(n);
  if (!(tau2 > 1e-300) || !std::isfinite(tau2)) {
    throw NumericalError("pseudo-likelihood fit has zero residual variance");
  }

  FitResult r;
  r.method = FitMethod::pseudolikelihood;
  r.alpha = alpha;
  r.eta = eta;
  r.tau2 = tau2;
  r.log_likelihood = -0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi * tau2) + 1.0);
  if (static_cast<Eigen::Index>(data.window.n_observed()) <= kMaxMlSites) {
    r.eta_bounds = eta_parameter_space(NeighborIncidence::build(data.window, m, false, false));
  } else {
    // 1/|M| is always inside the space: |lambda| <= max degree <= |M|.
    const double b = 1.0 / static_cast<double>(m.size());
    r.eta_bounds = {-b, b, false};
  }
  const double lo = r.eta_bounds.lower + kShrink, hi = r.eta_bounds.upper - kShrink;
  if (r.eta <= lo || r.eta >= hi) {
    r.eta = std::clamp(r.eta, lo, hi);
    r.boundary = true;
  }
  return r;
}

FitResult fit_gaussian(const GridData& data, const NeighborhoodTemplate& m, EdgeRule edge_rule,
                       FitMethod method) {
  if (method == FitMethod::ml &&
      static_cast<Eigen::Index>(data.window.n_observed()) > kMaxMlSites) {
    FitResult r = fit_pseudolikelihood(data, m, edge_rule);
    r.warning = "more than " + std::to_string(kMaxMlSites) +
                " sites: maximum likelihood replaced by pseudo-likelihood";
    return r;
  }
  return method == FitMethod::ml ? fit_ml(data, m, edge_rule) : fit_pseudolikelihood(data, m, edge_rule);
}

}  // namespace mrfgof
