#include "mrfgof/gibbs.hpp"

#include <cmath>
#include <limits>

#include "mrfgof/errors.hpp"

namespace mrfgof {

GibbsSampler::GibbsSampler(MrfModel model, SamplingWindow window, const ConcliqueCover& cover,
                           RandomStream& rng, SweepOrder order)
    : model_(std::move(model)), window_(std::move(window)), table_(window_, model_.neighborhood) {
  model_.validate();
  if (!(cover.family.neighborhood == model_.neighborhood)) {
    throw ConfigError("conclique cover does not match the model template");
  }
  if (!model_.neighborhood.is_symmetric()) {
    throw ConfigError("joint simulation requires a symmetric neighborhood template");
  }
  if (order == SweepOrder::conclique) {
    const auto labels = assign_labels(window_, model_.neighborhood, cover, LabelScope::all_observed);
    for (std::size_t j = 0; j < labels.q; ++j) {
      for (std::size_t c : labels.cells_of(j)) schedule_.push_back(c);
    }
  } else {
    schedule_ = window_.observed_indices();
  }

  values_.assign(window_.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c : window_.observed_indices()) {
    if (const auto* g = std::get_if<GaussianMrf>(&model_.params)) {
      values_[c] = g->alpha + std::sqrt(g->tau2) * rng.normal();
    } else {
      values_[c] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
  }
  scratch_.reserve(model_.neighborhood.size());
}

void GibbsSampler::sweep(RandomStream& rng) {
  for (std::size_t c : schedule_) {
    scratch_.clear();
    for (std::size_t nb : table_.neighbors(c)) scratch_.push_back(values_[nb]);
    values_[c] = conditional_sample(model_, scratch_, rng);
  }
}

GridData GibbsSampler::state() const {
  return {window_, Eigen::Map<const Eigen::VectorXd>(values_.data(), static_cast<Eigen::Index>(values_.size()))};
}

std::vector<GridData> gibbs_simulate(const MrfModel& model, const SamplingWindow& window,
                                     const ConcliqueCover& cover, const GibbsOptions& options,
                                     RandomStream& rng) {
  if (options.burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (options.spacing < 1) throw ConfigError("spacing must be >= 1");
  if (options.n_fields < 1) throw ConfigError("n_fields must be >= 1");
  GibbsSampler chain(model, window, cover, rng, options.order);
  chain.sweep(rng, options.burn_in);
  std::vector<GridData> out;
  out.reserve(static_cast<std::size_t>(options.n_fields));
  for (int f = 0; f < options.n_fields; ++f) {
    chain.sweep(rng, options.spacing);
    out.push_back(chain.state());
  }
  return out;
}

}  // namespace mrfgof
