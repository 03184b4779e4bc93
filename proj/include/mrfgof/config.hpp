#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrfgof/bootstrap.hpp"
#include "mrfgof/gibbs.hpp"
#include "mrfgof/models.hpp"
#include "mrfgof/null_distribution.hpp"
#include "mrfgof/studies.hpp"

namespace mrfgof {

std::string library_version();

struct ModelConfig {
  std::string family = "gaussian";  // gaussian | autologistic
  double alpha = 0.0;
  double eta = 0.0;
  double tau2 = 1.0;
  double kappa = 0.0;
  std::string neighborhood = "four";
  std::string edge_rule = "truncated_neighbors";

  MrfModel model() const;
};

struct NullConfig {
  std::string covariance = "auto";  // auto | gaussian_four_nearest | monte_carlo | independent
  int grid_size = 512;
  int replicates = 20000;
  double r = 2.0;
  std::vector<double> levels{0.90, 0.95, 0.99};
  bool bridge_sup = true;
  int mc_fields = 2000;
  int min_fields = 100;
  int mc_rows = 30;
  int mc_cols = 30;
};

struct GibbsConfig {
  int burn_in = 500;
  int spacing = 10;
  int n_fields = 1;
  std::string order = "conclique";
};

struct BootstrapSection {
  int B = 5000;
  std::string refit_method = "ml";
  std::string a_field_mode = "fresh";
  double level = 0.95;
  double max_drop_fraction = 0.05;
};

struct StudySection {
  std::vector<double> etas{0.0, 0.1, 0.24};
  std::vector<int> sides{10, 30};
  int replicates = 5000;
  int chain_length = 250;
  std::vector<double> gammas{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10,
                             0.11, 0.12, 0.13, 0.14, 0.15, 0.16, 0.17, 0.18, 0.19, 0.20};
  double eta_null = 0.0;
};

// One structured run configuration shared by every command. Unknown keys are
// rejected so that typos do not silently fall back to defaults.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: all available cores
  ModelConfig model;
  int rows = 10;
  int cols = 10;
  std::string data;
  bool data_header = false;
  std::string fit_method = "ml";
  GibbsConfig gibbs;
  NullConfig null;
  BootstrapSection bootstrap;
  StudySection study;
  std::string output;  // JSON path, stdout when empty
  std::string csv;     // optional CSV path

  std::uint64_t require_seed(const std::string& command) const;
  unsigned resolved_threads() const;

  NullSimulationOptions null_options() const;
  GibbsOptions gibbs_options() const;
  BootstrapConfig bootstrap_config() const;
  StudyOptions study_options() const;

  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_config(const std::string& path);
RunConfig config_from_string(const std::string& text);

}  // namespace mrfgof
