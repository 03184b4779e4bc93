#include "mrfgof/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mrfgof/errors.hpp"
#include "mrfgof/parallel.hpp"

#ifndef MRFGOF_VERSION
#define MRFGOF_VERSION "0.0.0"
#endif

namespace mrfgof {

using nlohmann::json;

std::string library_version() { return MRFGOF_VERSION; }

MrfModel ModelConfig::model() const {
  auto m = NeighborhoodTemplate::parse(neighborhood);
  if (family == "gaussian") return {GaussianMrf{alpha, eta, tau2}, std::move(m)};
  if (family == "autologistic") return {AutologisticMrf{kappa, eta}, std::move(m)};
  throw ConfigError("unknown model family '" + family + "' (gaussian|autologistic)");
}

std::uint64_t RunConfig::require_seed(const std::string& command) const {
  if (!seed) throw ConfigError(command + " is stochastic and needs an explicit seed");
  return *seed;
}

unsigned RunConfig::resolved_threads() const { return threads == 0 ? default_thread_count() : threads; }

NullSimulationOptions RunConfig::null_options() const {
  NullSimulationOptions o;
  o.grid_size = null.grid_size;
  o.replicates = null.replicates;
  o.r = null.r;
  o.levels = null.levels;
  o.bridge_sup = null.bridge_sup;
  o.seed = seed.value_or(0);
  o.threads = resolved_threads();
  return o;
}

GibbsOptions RunConfig::gibbs_options() const {
  GibbsOptions g;
  g.burn_in = gibbs.burn_in;
  g.spacing = gibbs.spacing;
  g.n_fields = gibbs.n_fields;
  if (gibbs.order == "conclique") g.order = SweepOrder::conclique;
  else if (gibbs.order == "raster") g.order = SweepOrder::raster;
  else throw ConfigError("unknown Gibbs order '" + gibbs.order + "' (conclique|raster)");
  return g;
}

BootstrapConfig RunConfig::bootstrap_config() const {
  BootstrapConfig b;
  b.B = bootstrap.B;
  b.burn_in = gibbs.burn_in;
  b.spacing = gibbs.spacing;
  b.seed = seed.value_or(0);
  b.refit_method = parse_fit_method(bootstrap.refit_method);
  b.a_field_mode = parse_a_field_mode(bootstrap.a_field_mode);
  b.edge_rule = parse_edge_rule(model.edge_rule);
  b.level = bootstrap.level;
  b.r = null.r;
  b.max_drop_fraction = bootstrap.max_drop_fraction;
  b.threads = resolved_threads();
  return b;
}

StudyOptions RunConfig::study_options() const {
  StudyOptions s;
  s.etas = study.etas;
  s.sides = study.sides;
  s.replicates = study.replicates;
  s.burn_in = gibbs.burn_in;
  s.spacing = gibbs.spacing;
  s.chain_length = study.chain_length;
  s.null = null_options();
  s.seed = seed.value_or(0);
  s.threads = resolved_threads();
  return s;
}

void RunConfig::validate() const {
  model.model().validate();
  parse_edge_rule(model.edge_rule);
  parse_fit_method(fit_method);
  gibbs_options();
  parse_fit_method(bootstrap.refit_method);
  parse_a_field_mode(bootstrap.a_field_mode);
  if (rows < 1 || cols < 1) throw ConfigError("rows and cols must be positive");
  if (gibbs.burn_in < 0 || gibbs.spacing < 1 || gibbs.n_fields < 1) {
    throw ConfigError("gibbs needs burn_in >= 0, spacing >= 1, n_fields >= 1");
  }
  static const std::set<std::string> kinds{"auto", "gaussian_four_nearest", "monte_carlo", "independent"};
  if (!kinds.count(null.covariance)) throw ConfigError("unknown null covariance '" + null.covariance + "'");
  if (null.grid_size < 64) throw ConfigError("null grid_size must be >= 64");
  if (null.replicates < 100) throw ConfigError("null replicates must be >= 100");
  if (!(null.r >= 1.0)) throw ConfigError("r must be >= 1");
  for (double l : null.levels) {
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("levels must lie in (0,1)");
  }
  if (null.mc_fields < 1 || null.min_fields < 1 || null.mc_rows < 3 || null.mc_cols < 3) {
    throw ConfigError("invalid Monte Carlo covariance settings");
  }
  bootstrap_config().validate();
  study_options().validate();
}

// --- JSON ------------------------------------------------------------------------

namespace {

// Reads keys from one object and rejects whatever it did not consume.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + where_ + k + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + where_ + key + "': " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

void to_json(json& j, const RunConfig& c) {
  j = json{
      {"seed", c.seed ? json(*c.seed) : json(nullptr)},
      {"threads", c.threads},
      {"model",
       {{"family", c.model.family},
        {"alpha", c.model.alpha},
        {"eta", c.model.eta},
        {"tau2", c.model.tau2},
        {"kappa", c.model.kappa},
        {"neighborhood", c.model.neighborhood},
        {"edge_rule", c.model.edge_rule}}},
      {"rows", c.rows},
      {"cols", c.cols},
      {"data", c.data},
      {"data_header", c.data_header},
      {"fit_method", c.fit_method},
      {"gibbs",
       {{"burn_in", c.gibbs.burn_in},
        {"spacing", c.gibbs.spacing},
        {"n_fields", c.gibbs.n_fields},
        {"order", c.gibbs.order}}},
      {"null",
       {{"covariance", c.null.covariance},
        {"grid_size", c.null.grid_size},
        {"replicates", c.null.replicates},
        {"r", c.null.r},
        {"levels", c.null.levels},
        {"bridge_sup", c.null.bridge_sup},
        {"mc_fields", c.null.mc_fields},
        {"min_fields", c.null.min_fields},
        {"mc_rows", c.null.mc_rows},
        {"mc_cols", c.null.mc_cols}}},
      {"bootstrap",
       {{"B", c.bootstrap.B},
        {"refit_method", c.bootstrap.refit_method},
        {"a_field_mode", c.bootstrap.a_field_mode},
        {"level", c.bootstrap.level},
        {"max_drop_fraction", c.bootstrap.max_drop_fraction}}},
      {"study",
       {{"etas", c.study.etas},
        {"sides", c.study.sides},
        {"replicates", c.study.replicates},
        {"chain_length", c.study.chain_length},
        {"gammas", c.study.gammas},
        {"eta_null", c.study.eta_null}}},
      {"output", c.output},
      {"csv", c.csv},
  };
}

void from_json(const json& j, RunConfig& c) {
  Reader top(j, "");
  if (const json* s = top.sub("seed"); s && !s->is_null()) {
    if (!s->is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    c.seed = s->get<std::uint64_t>();
  }
  top.get("threads", c.threads);
  if (const json* m = top.sub("model")) {
    Reader r(*m, "model.");
    r.get("family", c.model.family);
    r.get("alpha", c.model.alpha);
    r.get("eta", c.model.eta);
    r.get("tau2", c.model.tau2);
    r.get("kappa", c.model.kappa);
    r.get("neighborhood", c.model.neighborhood);
    r.get("edge_rule", c.model.edge_rule);
  }
  top.get("rows", c.rows);
  top.get("cols", c.cols);
  top.get("data", c.data);
  top.get("data_header", c.data_header);
  top.get("fit_method", c.fit_method);
  if (const json* g = top.sub("gibbs")) {
    Reader r(*g, "gibbs.");
    r.get("burn_in", c.gibbs.burn_in);
    r.get("spacing", c.gibbs.spacing);
    r.get("n_fields", c.gibbs.n_fields);
    r.get("order", c.gibbs.order);
  }
  if (const json* n = top.sub("null")) {
    Reader r(*n, "null.");
    r.get("covariance", c.null.covariance);
    r.get("grid_size", c.null.grid_size);
    r.get("replicates", c.null.replicates);
    r.get("r", c.null.r);
    r.get("levels", c.null.levels);
    r.get("bridge_sup", c.null.bridge_sup);
    r.get("mc_fields", c.null.mc_fields);
    r.get("min_fields", c.null.min_fields);
    r.get("mc_rows", c.null.mc_rows);
    r.get("mc_cols", c.null.mc_cols);
  }
  if (const json* b = top.sub("bootstrap")) {
    Reader r(*b, "bootstrap.");
    r.get("B", c.bootstrap.B);
    r.get("refit_method", c.bootstrap.refit_method);
    r.get("a_field_mode", c.bootstrap.a_field_mode);
    r.get("level", c.bootstrap.level);
    r.get("max_drop_fraction", c.bootstrap.max_drop_fraction);
  }
  if (const json* s = top.sub("study")) {
    Reader r(*s, "study.");
    r.get("etas", c.study.etas);
    r.get("sides", c.study.sides);
    r.get("replicates", c.study.replicates);
    r.get("chain_length", c.study.chain_length);
    r.get("gammas", c.study.gammas);
    r.get("eta_null", c.study.eta_null);
  }
  top.get("output", c.output);
  top.get("csv", c.csv);
}

RunConfig config_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return j.get<RunConfig>();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_string(ss.str());
}

}  // namespace mrfgof
