#pragma once

#include <vector>

#include "mrfgof/conclique.hpp"
#include "mrfgof/grid_data.hpp"
#include "mrfgof/models.hpp"

namespace mrfgof {

enum class SweepOrder {
  conclique,  // update conclique 1, then 2, ..., each in lexicographic order
  raster,     // plain lexicographic scan
};

struct GibbsOptions {
  int burn_in = 500;
  int spacing = 10;
  int n_fields = 1;
  SweepOrder order = SweepOrder::conclique;
};

// Single-site Gibbs chain on the observed cells of a window. Updates use the
// observed neighbors only, so the chain targets the finite-window field.
// Initial state: i.i.d. N(alpha, tau2) or Bernoulli(1/2), in site order.
class GibbsSampler {
 public:
  GibbsSampler(MrfModel model, SamplingWindow window, const ConcliqueCover& cover,
               RandomStream& rng, SweepOrder order = SweepOrder::conclique);

  void sweep(RandomStream& rng);
  void sweep(RandomStream& rng, int count) {
    for (int i = 0; i < count; ++i) sweep(rng);
  }
  GridData state() const;

 private:
  MrfModel model_;
  SamplingWindow window_;
  NeighborTable table_;
  std::vector<std::size_t> schedule_;
  std::vector<double> values_;
  std::vector<double> scratch_;
};

// Burn in, then emit one field every `spacing` sweeps until n_fields are
// collected. Throws ConfigError on cover/template mismatch, an asymmetric
// template or invalid options.
std::vector<GridData> gibbs_simulate(const MrfModel& model, const SamplingWindow& window,
                                     const ConcliqueCover& cover, const GibbsOptions& options,
                                     RandomStream& rng);

}  // namespace mrfgof
