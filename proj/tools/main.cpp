#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mrfgof/errors.hpp"

using namespace mrfgof;

namespace {

template <typename T>
void override_with(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conclique-based goodness-of-fit tests for Markov random fields"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> data, output, csv, family, neighborhood, edge_rule, fit_method, covariance,
      refit_method, a_field_mode, order;
  std::optional<double> alpha, eta, tau2, kappa, r, level;
  std::optional<int> rows, cols, grid_size, replicates, burn_in, spacing, n_fields, boot_b, mc_fields, study_reps,
      chain_length;
  std::optional<std::vector<double>> etas, gammas;
  std::optional<std::vector<int>> sides;
  bool header = false;

  app.add_option("--config", config_path, "JSON run configuration; flags override its values");
  app.add_option("--seed", seed, "Base random seed");
  app.add_option("--threads", threads, "Worker threads (default: all cores)");
  app.add_option("--data", data, "Data grid CSV (NA marks unobserved cells)");
  app.add_flag("--header", header, "Data CSV has a header line");
  app.add_option("-o,--output", output, "JSON result path (default: stdout)");
  app.add_option("--csv", csv, "CSV output path");
  app.add_option("--family", family, "gaussian | autologistic");
  app.add_option("--neighborhood", neighborhood, "four | eight | unilateral | offsets like 0,1;0,-1");
  app.add_option("--edge-rule", edge_rule, "interior_only | truncated_neighbors");
  app.add_option("--alpha", alpha);
  app.add_option("--eta", eta);
  app.add_option("--tau2", tau2);
  app.add_option("--kappa", kappa);
  app.add_option("--rows", rows);
  app.add_option("--cols", cols);
  app.add_option("--fit-method", fit_method, "ml | pseudolikelihood");
  app.add_option("--burn-in", burn_in);
  app.add_option("--spacing", spacing);
  app.add_option("--n-fields", n_fields);
  app.add_option("--order", order, "Gibbs sweep order: conclique | raster");
  app.add_option("--covariance", covariance, "auto | gaussian_four_nearest | monte_carlo | independent");
  app.add_option("--grid-size", grid_size, "Limit-process grid size G");
  app.add_option("--replicates", replicates, "Limit-process replicates R");
  app.add_option("--r", r, "Norm order for T3 and T4");
  app.add_option("--mc-fields", mc_fields);
  app.add_option("--B", boot_b, "Bootstrap replicates");
  app.add_option("--refit-method", refit_method, "ml | pseudolikelihood");
  app.add_option("--a-field-mode", a_field_mode, "fresh | fixed");
  app.add_option("--level", level, "Percentile interval level");
  app.add_option("--etas", etas, "Study eta values")->delimiter(',');
  app.add_option("--sides", sides, "Study window sides")->delimiter(',');
  app.add_option("--gammas", gammas, "Power study sizes")->delimiter(',');
  app.add_option("--study-replicates", study_reps);
  app.add_option("--chain-length", chain_length);

  const std::map<std::string, std::function<void(const RunConfig&)>> commands{
      {"partition", cli::cmd_partition},
      {"simulate", cli::cmd_simulate},
      {"fit", cli::cmd_fit},
      {"residuals", cli::cmd_residuals},
      {"null-dist", cli::cmd_null_dist},
      {"test-simple", cli::cmd_test_simple},
      {"test-composite", cli::cmd_test_composite},
      {"study-table1", cli::cmd_study_table1},
      {"study-distance", cli::cmd_study_distance},
      {"power", cli::cmd_power},
  };
  const std::map<std::string, std::string> help{
      {"partition", "Conclique cover and label grid"},
      {"simulate", "Gibbs-simulate fields"},
      {"fit", "Fit the conditional Gaussian model"},
      {"residuals", "Generalized spatial residuals and statistics"},
      {"null-dist", "Simulate limit quantiles of T1..T4"},
      {"test-simple", "Goodness-of-fit test of a fully specified model"},
      {"test-composite", "Parametric bootstrap test with estimated parameters"},
      {"study-table1", "Finite-sample rejection rates at limit quantiles"},
      {"study-distance", "KS / CM distances between finite-sample and limit draws"},
      {"power", "Power versus size curves"},
  };
  for (const auto& [name, _] : commands) app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = seed;
    override_with(threads, cfg.threads);
    override_with(data, cfg.data);
    if (header) cfg.data_header = true;
    override_with(output, cfg.output);
    override_with(csv, cfg.csv);
    override_with(family, cfg.model.family);
    override_with(neighborhood, cfg.model.neighborhood);
    override_with(edge_rule, cfg.model.edge_rule);
    override_with(alpha, cfg.model.alpha);
    override_with(eta, cfg.model.eta);
    override_with(tau2, cfg.model.tau2);
    override_with(kappa, cfg.model.kappa);
    override_with(rows, cfg.rows);
    override_with(cols, cfg.cols);
    override_with(fit_method, cfg.fit_method);
    override_with(burn_in, cfg.gibbs.burn_in);
    override_with(spacing, cfg.gibbs.spacing);
    override_with(n_fields, cfg.gibbs.n_fields);
    override_with(order, cfg.gibbs.order);
    override_with(covariance, cfg.null.covariance);
    override_with(grid_size, cfg.null.grid_size);
    override_with(replicates, cfg.null.replicates);
    override_with(r, cfg.null.r);
    override_with(mc_fields, cfg.null.mc_fields);
    override_with(boot_b, cfg.bootstrap.B);
    override_with(refit_method, cfg.bootstrap.refit_method);
    override_with(a_field_mode, cfg.bootstrap.a_field_mode);
    override_with(level, cfg.bootstrap.level);
    override_with(etas, cfg.study.etas);
    override_with(sides, cfg.study.sides);
    override_with(gammas, cfg.study.gammas);
    override_with(study_reps, cfg.study.replicates);
    override_with(chain_length, cfg.study.chain_length);
    cfg.validate();

    commands.at(app.get_subcommands().front()->get_name())(cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
