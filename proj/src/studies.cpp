#include "mrfgof/studies.hpp"

#include <algorithm>
#include <cmath>

#include "mrfgof/errors.hpp"
#include "mrfgof/gibbs.hpp"
#include "mrfgof/parallel.hpp"

namespace mrfgof {

void StudyOptions::validate() const {
  if (etas.empty() || sides.empty()) throw ConfigError("study needs at least one eta and one side");
  for (double e : etas) {
    if (!(std::fabs(e) < 0.25)) throw ConfigError("study eta values must satisfy |eta| < 0.25");
  }
  for (int s : sides) {
    if (s < 3) throw ConfigError("study window side must be >= 3");
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (burn_in < 0 || spacing < 1 || chain_length < 1) throw ConfigError("invalid Gibbs settings");
}

std::array<std::vector<double>, 4> finite_sample_statistics(double eta, double eta_test, int side,
                                                            const StudyOptions& options,
                                                            std::uint64_t seed) {
  const auto m = NeighborhoodTemplate::nearest(2);
  const auto cover = build_cover(m);
  const auto window = SamplingWindow::grid(side, side);
  const MrfModel sim{GaussianMrf{0.0, eta, 1.0}, m};
  const MrfModel test{GaussianMrf{0.0, eta_test, 1.0}, m};
  const Eigen::VectorXd grid = default_u_grid(1024);

  const auto n_rep = static_cast<std::size_t>(options.replicates);
  const auto len = static_cast<std::size_t>(options.chain_length);
  const std::size_t n_chains = (n_rep + len - 1) / len;
  std::array<std::vector<double>, 4> draws;
  for (auto& d : draws) d.assign(n_rep, 0.0);

  parallel_for(n_chains, options.threads, [&](std::size_t c) {
    RandomStream rng(seed, "study-chain", c);
    GibbsOptions g;
    g.burn_in = options.burn_in;
    g.spacing = options.spacing;
    g.n_fields = static_cast<int>(std::min(len, n_rep - c * len));
    const auto fields = gibbs_simulate(sim, window, cover, g, rng);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto res = generalized_residuals(fields[i], test, cover, EdgeRule::truncated_neighbors, rng, grid);
      const auto t = compute_statistics(empirical_process(res), options.null.r);
      for (std::size_t f = 0; f < 4; ++f) draws[f][c * len + i] = t[f];
    }
  });
  return draws;
}

namespace {

NullQuantileTable null_table(double eta, const StudyOptions& options, std::uint64_t seed) {
  NullSimulationOptions o = options.null;
  o.seed = seed;
  o.threads = options.threads;
  return simulate_null_quantiles(LimitCovarianceSpec::gaussian_four_nearest(eta), o);
}

}  // namespace

std::vector<Table1Row> study_table1(const StudyOptions& options) {
  options.validate();
  std::vector<Table1Row> rows;
  for (std::size_t e = 0; e < options.etas.size(); ++e) {
    const double eta = options.etas[e];
    const auto table = null_table(eta, options, derive_seed(options.seed, "table1-null", e));
    for (std::size_t s = 0; s < options.sides.size(); ++s) {
      const int side = options.sides[s];
      const auto draws = finite_sample_statistics(
          eta, eta, side, options, derive_seed(options.seed, "table1-finite", e * 1000 + s));
      const double n = static_cast<double>(options.replicates);
      for (std::size_t f = 0; f < 4; ++f) {
        for (std::size_t l = 0; l < table.levels.size(); ++l) {
          const double q = table.quantiles[f][l];
          const auto above = std::count_if(draws[f].begin(), draws[f].end(), [&](double t) { return t > q; });
          const double p = static_cast<double>(above) / n;
          rows.push_back({eta, side * side, static_cast<int>(f + 1), table.levels[l], p,
                          std::sqrt(p * (1.0 - p) / n)});
        }
      }
    }
  }
  return rows;
}

std::vector<DistanceRow> study_distance(const StudyOptions& options) {
  options.validate();
  std::vector<DistanceRow> rows;
  for (std::size_t e = 0; e < options.etas.size(); ++e) {
    const double eta = options.etas[e];
    const auto limit = null_table(eta, options, derive_seed(options.seed, "distance-null", e));
    const auto limit2 = null_table(eta, options, derive_seed(options.seed, "distance-null-2", e));
    for (std::size_t s = 0; s < options.sides.size(); ++s) {
      const int side = options.sides[s];
      const auto draws = finite_sample_statistics(
          eta, eta, side, options, derive_seed(options.seed, "distance-finite", e * 1000 + s));
      for (std::size_t f = 0; f < 4; ++f) {
        rows.push_back({eta, side * side, static_cast<int>(f + 1), "finite-vs-limit",
                        ks_distance(draws[f], limit.draws[f]), cm_distance(draws[f], limit.draws[f])});
      }
    }
    for (std::size_t f = 0; f < 4; ++f) {
      rows.push_back({eta, 0, static_cast<int>(f + 1), "limit-vs-limit",
                      ks_distance(limit.draws[f], limit2.draws[f]), cm_distance(limit.draws[f], limit2.draws[f])});
    }
  }
  return rows;
}

std::vector<PowerRow> study_power(const StudyOptions& options, const std::vector<double>& gammas,
                                  double eta_null) {
  options.validate();
  for (double g : gammas) {
    if (!(g > 0.0 && g < 1.0)) throw ConfigError("power gamma values must lie in (0,1)");
  }
  const auto table = null_table(eta_null, options, derive_seed(options.seed, "power-null"));
  std::array<std::vector<double>, 4> sorted = table.draws;
  for (auto& d : sorted) std::sort(d.begin(), d.end());

  std::vector<PowerRow> rows;
  for (std::size_t e = 0; e < options.etas.size(); ++e) {
    for (std::size_t s = 0; s < options.sides.size(); ++s) {
      const int side = options.sides[s];
      const auto draws = finite_sample_statistics(
          options.etas[e], eta_null, side, options, derive_seed(options.seed, "power-finite", e * 1000 + s));
      for (std::size_t f = 0; f < 4; ++f) {
        for (double g : gammas) {
          const double q = quantile_type7_sorted(sorted[f], 1.0 - g);
          const auto above = std::count_if(draws[f].begin(), draws[f].end(), [&](double t) { return t > q; });
          rows.push_back({options.etas[e], side * side, static_cast<int>(f + 1), g,
                          static_cast<double>(above) / static_cast<double>(options.replicates)});
        }
      }
    }
  }
  return rows;
}

}  // namespace mrfgof
