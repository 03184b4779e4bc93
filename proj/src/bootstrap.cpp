#include "mrfgof/bootstrap.hpp"

#include <cmath>
#include <memory>
#include <optional>

#include "mrfgof/errors.hpp"
#include "mrfgof/gibbs.hpp"
#include "mrfgof/null_distribution.hpp"
#include "mrfgof/parallel.hpp"

namespace mrfgof {

AFieldMode parse_a_field_mode(const std::string& s) {
  if (s == "fresh") return AFieldMode::fresh;
  if (s == "fixed") return AFieldMode::fixed;
  throw ConfigError("unknown a_field_mode '" + s + "' (fresh|fixed)");
}

std::string to_string(AFieldMode m) { return m == AFieldMode::fresh ? "fresh" : "fixed"; }

void BootstrapConfig::validate() const {
  if (B < 1) throw ConfigError("bootstrap B must be >= 1");
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (spacing < 1) throw ConfigError("spacing must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("interval level must lie in (0,1)");
  if (!(r >= 1.0)) throw ConfigError("norm order r must be >= 1");
  if (u_grid_points < 2) throw ConfigError("u grid needs at least two points");
  if (!(max_drop_fraction >= 0.0 && max_drop_fraction < 1.0)) {
    throw ConfigError("max_drop_fraction must lie in [0,1)");
  }
}

Interval percentile_interval(std::span<const double> draws, double level) {
  if (draws.empty()) throw ConfigError("percentile interval of an empty sample");
  if (!(level >= 0.0 && level < 1.0)) throw ConfigError("interval level must lie in [0,1)");
  std::vector<double> s(draws.begin(), draws.end());
  std::sort(s.begin(), s.end());
  return {quantile_type7_sorted(s, (1.0 - level) / 2.0), quantile_type7_sorted(s, (1.0 + level) / 2.0)};
}

namespace {

GofStatistics statistics_under(const GridData& field, const GaussianMrf& theta, const NeighborhoodTemplate& m,
                               const ConcliqueCover& cover, const BootstrapConfig& cfg,
                               std::span<const double> a_field, const Eigen::VectorXd& grid) {
  const MrfModel model{theta, m};
  const auto res = generalized_residuals(field, model, cover, cfg.edge_rule, a_field, grid);
  return compute_statistics(empirical_process(res), cfg.r);
}

}  // namespace

BootstrapResult composite_test(const GridData& data, const NeighborhoodTemplate& m,
                               const ConcliqueCover& cover, const BootstrapConfig& cfg) {
  cfg.validate();
  const bool use_fitter = cfg.refit_method == FitMethod::ml &&
                          static_cast<Eigen::Index>(data.window.n_observed()) <= kMaxMlSites;
  std::unique_ptr<GaussianMlFitter> fitter;
  if (use_fitter) fitter = std::make_unique<GaussianMlFitter>(data.window, m);
  auto refit = [&](const GridData& f) {
    return use_fitter ? fitter->fit(f) : fit_gaussian(f, m, cfg.edge_rule, cfg.refit_method);
  };

  BootstrapResult out;
  out.fit = refit(data);
  const Eigen::VectorXd grid = default_u_grid(cfg.u_grid_points);

  RandomStream a0(cfg.seed, "bootstrap-a-field", 0);
  const std::vector<double> fixed_a = draw_a_field(data.window, a0);
  out.observed = statistics_under(data, out.fit.params(), m, cover, cfg, fixed_a, grid);

  // One chain, B fields.
  RandomStream chain_rng(cfg.seed, "bootstrap-chain");
  GibbsOptions g;
  g.burn_in = cfg.burn_in;
  g.spacing = cfg.spacing;
  g.n_fields = cfg.B;
  const auto fields = gibbs_simulate(MrfModel{out.fit.params(), m}, data.window, cover, g, chain_rng);

  struct Replicate {
    std::optional<FitResult> fit;
    GofStatistics t;
  };
  std::vector<Replicate> reps(fields.size());
  parallel_for(fields.size(), cfg.threads, [&](std::size_t b) {
    try {
      FitResult f = refit(fields[b]);
      std::vector<double> a;
      std::span<const double> a_span = fixed_a;
      if (cfg.a_field_mode == AFieldMode::fresh) {
        RandomStream ar(cfg.seed, "bootstrap-a-field", b + 1);
        a = draw_a_field(data.window, ar);
        a_span = a;
      }
      reps[b].t = statistics_under(fields[b], f.params(), m, cover, cfg, a_span, grid);
      reps[b].fit = f;
    } catch (const DataError&) {
    } catch (const NumericalError&) {
    } catch (const ConfigError&) {
    }
  });

  std::vector<std::size_t> kept;
  for (std::size_t b = 0; b < reps.size(); ++b) {
    if (reps[b].fit) kept.push_back(b);
  }
  out.kept = static_cast<int>(kept.size());
  out.dropped = cfg.B - out.kept;
  if (kept.empty() || static_cast<double>(out.dropped) > cfg.max_drop_fraction * cfg.B) {
    throw NumericalError(std::to_string(out.dropped) + " of " + std::to_string(cfg.B) +
                         " bootstrap refits failed");
  }

  out.replicate_stats.resize(static_cast<Eigen::Index>(kept.size()), 4);
  out.parameter_draws.resize(static_cast<Eigen::Index>(kept.size()), 3);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto& r = reps[kept[i]];
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t f = 0; f < 4; ++f) out.replicate_stats(row, static_cast<Eigen::Index>(f)) = r.t[f];
    out.parameter_draws(row, 0) = r.fit->alpha;
    out.parameter_draws(row, 1) = r.fit->eta;
    out.parameter_draws(row, 2) = r.fit->tau2;
  }
  const double n = static_cast<double>(kept.size());
  for (Eigen::Index f = 0; f < 4; ++f) {
    const auto col = out.replicate_stats.col(f);
    const double obs = out.observed[static_cast<std::size_t>(f)];
    const auto hits = (col.array() >= obs).count();
    out.p_values[static_cast<std::size_t>(f)] = (1.0 + static_cast<double>(hits)) / (n + 1.0);
  }
  for (Eigen::Index p = 0; p < 3; ++p) {
    const Eigen::VectorXd col = out.parameter_draws.col(p);
    out.intervals[static_cast<std::size_t>(p)] = percentile_interval({col.data(), static_cast<std::size_t>(col.size())}, cfg.level);
  }
  return out;
}

}  // namespace mrfgof
