#include "mrfgof/models.hpp"

#include <cmath>

#include "mrfgof/errors.hpp"
#include "mrfgof/normal.hpp"

namespace mrfgof {

EdgeRule parse_edge_rule(const std::string& s) {
  if (s == "interior_only" || s == "interior") return EdgeRule::interior_only;
  if (s == "truncated_neighbors" || s == "truncated") return EdgeRule::truncated_neighbors;
  throw ConfigError("unknown edge rule '" + s + "'");
}

std::string to_string(EdgeRule r) {
  return r == EdgeRule::interior_only ? "interior_only" : "truncated_neighbors";
}

std::string MrfModel::family() const { return is_continuous() ? "gaussian" : "autologistic"; }

void MrfModel::validate() const {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianMrf>) {
          if (!std::isfinite(p.alpha) || !std::isfinite(p.eta)) {
            throw ConfigError("gaussian parameters must be finite");
          }
          if (!(p.tau2 > 0.0) || !std::isfinite(p.tau2)) throw ConfigError("tau2 must be positive");
        } else {
          if (!std::isfinite(p.kappa) || !std::isfinite(p.eta)) {
            throw ConfigError("autologistic parameters must be finite");
          }
        }
      },
      params);
}

double conditional_mean_gaussian(const GaussianMrf& g, std::span<const double> neighbor_values) {
  double dev = 0.0;
  for (double y : neighbor_values) dev += y - g.alpha;
  return g.alpha + g.eta * dev;
}

double success_probability(const AutologisticMrf& b, std::span<const double> neighbor_values) {
  double sum = 0.0;
  for (double y : neighbor_values) sum += y;
  const double logit = b.kappa + b.eta * sum;
  return 1.0 / (1.0 + std::exp(-logit));
}

namespace {

template <typename Gauss, typename Binary>
double dispatch(const MrfModel& model, Gauss&& gauss, Binary&& binary) {
  if (const auto* g = std::get_if<GaussianMrf>(&model.params)) {
    if (!(g->tau2 > 0.0)) throw ConfigError("tau2 must be positive");
    return gauss(*g);
  }
  return binary(std::get<AutologisticMrf>(model.params));
}

}  // namespace

double conditional_cdf(const MrfModel& model, double y, std::span<const double> neighbor_values) {
  return dispatch(
      model,
      [&](const GaussianMrf& g) {
        return normal_cdf((y - conditional_mean_gaussian(g, neighbor_values)) / std::sqrt(g.tau2));
      },
      [&](const AutologisticMrf& b) {
        if (y < 0.0) return 0.0;
        if (y < 1.0) return 1.0 - success_probability(b, neighbor_values);
        return 1.0;
      });
}

double conditional_cdf_left(const MrfModel& model, double y, std::span<const double> neighbor_values) {
  return dispatch(
      model, [&](const GaussianMrf&) { return conditional_cdf(model, y, neighbor_values); },
      [&](const AutologisticMrf& b) {
        if (y <= 0.0) return 0.0;
        if (y <= 1.0) return 1.0 - success_probability(b, neighbor_values);
        return 1.0;
      });
}

double conditional_sample(const MrfModel& model, std::span<const double> neighbor_values,
                          RandomStream& rng) {
  return dispatch(
      model,
      [&](const GaussianMrf& g) {
        return conditional_mean_gaussian(g, neighbor_values) + std::sqrt(g.tau2) * rng.normal();
      },
      [&](const AutologisticMrf& b) {
        // Inverse CDF: 0 on [0, 1 - p), 1 otherwise.
        const double p = success_probability(b, neighbor_values);
        return rng.uniform() < 1.0 - p ? 0.0 : 1.0;
      });
}

}  // namespace mrfgof
