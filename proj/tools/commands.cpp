#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include "mrfgof/bootstrap.hpp"
#include "mrfgof/conclique.hpp"
#include "mrfgof/errors.hpp"
#include "mrfgof/estimation.hpp"
#include "mrfgof/kolmogorov.hpp"
#include "mrfgof/studies.hpp"

namespace mrfgof::cli {

using nlohmann::json;

namespace {

const char* kNames[4] = {"T1", "T2", "T3", "T4"};

std::string num(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

// Thread count and output paths do not change results, so they stay out of
// the echoed config; replays with different --threads compare equal.
json envelope(const std::string& command, const RunConfig& cfg) {
  json echo = cfg;
  echo.erase("threads");
  echo.erase("output");
  echo.erase("csv");
  return json{{"command", command}, {"version", library_version()}, {"config", echo}};
}

void emit(const json& j, const RunConfig& cfg) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw DataError("cannot write '" + cfg.output + "'");
  out << text;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

GridData load_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ConfigError("this command needs a data file (--data)");
  return read_grid_csv_file(cfg.data, cfg.data_header);
}

SamplingWindow window_of(const RunConfig& cfg) {
  if (!cfg.data.empty()) return load_data(cfg).window;
  return SamplingWindow::grid(cfg.rows, cfg.cols);
}

json point_json(const LatticePoint& p) { return json(p.coords); }

json fit_json(const FitResult& f) {
  json j{{"alpha", f.alpha},
         {"eta", f.eta},
         {"tau2", f.tau2},
         {"logLik", f.log_likelihood},
         {"etaBounds", {f.eta_bounds.lower, f.eta_bounds.upper}},
         {"etaUnbounded", f.eta_bounds.unbounded},
         {"method", to_string(f.method)},
         {"boundaryFlag", f.boundary}};
  if (!f.warning.empty()) {
    j["warning"] = f.warning;
    std::cerr << "warning: " << f.warning << "\n";
  }
  return j;
}

json stats_json(const GofStatistics& t) { return json{t.t1, t.t2, t.t3, t.t4}; }

// Parameter-space check for a hypothesized Gaussian model on the data window.
void check_theta(const MrfModel& model, const SamplingWindow& window) {
  model.validate();
  const auto* g = std::get_if<GaussianMrf>(&model.params);
  if (!g) return;
  EtaSpace space;
  if (static_cast<Eigen::Index>(window.n_observed()) <= kMaxMlSites) {
    space = eta_parameter_space(NeighborIncidence::build(window, model.neighborhood, false, false));
  } else {
    const double b = 1.0 / static_cast<double>(model.neighborhood.size());
    space = {-b, b, false};
  }
  if (!space.unbounded && !space.contains(g->eta)) {
    throw ConfigError("eta = " + num(g->eta) + " is outside the parameter space (" + num(space.lower) + ", " +
                      num(space.upper) + ")");
  }
}

LimitCovarianceSpec covariance_spec(const RunConfig& cfg, const MrfModel& model, const ConcliqueCover& cover) {
  std::string kind = cfg.null.covariance;
  const bool g4 = model.is_continuous() && model.neighborhood == NeighborhoodTemplate::nearest(2);
  if (kind == "auto") kind = g4 ? "gaussian_four_nearest" : "monte_carlo";
  if (kind == "gaussian_four_nearest") {
    if (!g4) throw ConfigError("the closed-form covariance needs the Gaussian four-nearest model");
    return LimitCovarianceSpec::gaussian_four_nearest(std::get<GaussianMrf>(model.params).eta);
  }
  if (kind == "independent") {
    int det = 1;
    for (int d : cover.family.delta) det *= d;
    std::vector<std::size_t> sizes;
    for (const auto& g : cover.groups) sizes.push_back(g.size());
    return LimitCovarianceSpec::independent(det, sizes);
  }
  MonteCarloCrossCovariance::Options o;
  o.mc_fields = cfg.null.mc_fields;
  o.min_fields = cfg.null.min_fields;
  o.gibbs.burn_in = cfg.gibbs.burn_in;
  o.gibbs.spacing = cfg.gibbs.spacing;
  RandomStream rng(cfg.require_seed("monte carlo covariance"), "mc-covariance");
  auto mc = std::make_shared<const MonteCarloCrossCovariance>(MonteCarloCrossCovariance::simulate(
      model, SamplingWindow::grid(cfg.null.mc_rows, cfg.null.mc_cols), cover, o, rng));
  return LimitCovarianceSpec::generic(std::move(mc));
}

json table_json(const NullQuantileTable& t) {
  json q, summary;
  for (std::size_t f = 0; f < 4; ++f) {
    q[kNames[f]] = t.quantiles[f];
    const auto& d = t.draws[f];
    double mean = 0.0, ss = 0.0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(d.size());
    for (double x : d) ss += (x - mean) * (x - mean);
    summary[kNames[f]] = {{"mean", mean},
                          {"sd", std::sqrt(ss / static_cast<double>(d.size() - 1))},
                          {"min", *std::min_element(d.begin(), d.end())},
                          {"max", *std::max_element(d.begin(), d.end())}};
  }
  json q95, q99;
  for (std::size_t f = 0; f < 4; ++f) {
    q95.push_back(t.quantile(f, 0.95));
    q99.push_back(t.quantile(f, 0.99));
  }
  return json{{"levels", t.levels},   {"quantiles", q},          {"q95", q95},
              {"q99", q99},           {"summary", summary},      {"replicates", t.draws[0].size()},
              {"jitter", t.jitter},   {"eigenClipped", t.eigen_clipped}};
}

}  // namespace

void cmd_partition(const RunConfig& cfg) {
  const auto m = NeighborhoodTemplate::parse(cfg.model.neighborhood);
  const auto window = window_of(cfg);
  const auto cover = build_cover(m);
  const auto scope = parse_edge_rule(cfg.model.edge_rule) == EdgeRule::interior_only ? LabelScope::interior_only
                                                                                        : LabelScope::all_observed;
  const auto labels = assign_labels(window, m, cover, scope);

  json groups = json::array();
  for (const auto& g : cover.groups) {
    json members = json::array();
    for (std::size_t i : g) members.push_back(point_json(cover.family.offsets[i]));
    groups.push_back(members);
  }
  json j = envelope("partition", cfg);
  j["q"] = cover.q();
  j["qStar"] = cover.q_star();
  j["delta"] = cover.family.delta;
  j["groups"] = groups;
  j["counts"] = labels.counts();
  emit(j, cfg);

  if (!cfg.csv.empty()) {
    if (window.dim() != 2) throw ConfigError("label grids are written for two-dimensional windows only");
    auto out = open_csv(cfg.csv);
    const int cols = window.extent(1);
    for (std::size_t c = 0; c < window.size(); ++c) {
      const int l = labels.label[c];
      out << (l < 0 ? std::string("NA") : std::to_string(l + 1));
      out << ((static_cast<int>(c) + 1) % cols == 0 ? "\n" : ",");
    }
  }
}

void cmd_simulate(const RunConfig& cfg) {
  const auto model = cfg.model.model();
  const auto window = window_of(cfg);
  check_theta(model, window);
  const auto cover = build_cover(model.neighborhood);
  RandomStream rng(cfg.require_seed("simulate"), "simulate");
  const auto fields = gibbs_simulate(model, window, cover, cfg.gibbs_options(), rng);

  json j = envelope("simulate", cfg);
  json summary = json::array(), files = json::array();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const Eigen::VectorXd v = fields[i].observed_values();
    const double mean = v.mean();
    summary.push_back({{"mean", mean}, {"variance", (v.array() - mean).square().sum() / static_cast<double>(v.size())}});
    if (!cfg.csv.empty()) {
      std::string path = cfg.csv;
      if (fields.size() > 1) {
        const auto dot = path.rfind('.');
        const std::string tag = "_" + std::to_string(i + 1);
        path = dot == std::string::npos ? path + tag : path.substr(0, dot) + tag + path.substr(dot);
      }
      write_grid_csv_file(path, fields[i]);
      files.push_back(path);
    }
  }
  j["nFields"] = fields.size();
  j["fields"] = summary;
  j["files"] = files;
  emit(j, cfg);
}

void cmd_fit(const RunConfig& cfg) {
  const auto data = load_data(cfg);
  const auto m = NeighborhoodTemplate::parse(cfg.model.neighborhood);
  const auto fit = fit_gaussian(data, m, parse_edge_rule(cfg.model.edge_rule), parse_fit_method(cfg.fit_method));
  json j = envelope("fit", cfg);
  j["fit"] = fit_json(fit);
  emit(j, cfg);
}

void cmd_residuals(const RunConfig& cfg) {
  const auto data = load_data(cfg);
  const auto model = cfg.model.model();
  check_theta(model, data.window);
  const auto cover = build_cover(model.neighborhood);
  const std::uint64_t seed = model.is_continuous() ? cfg.seed.value_or(0) : cfg.require_seed("residuals");
  RandomStream rng(seed, "residual-a-field");
  const auto res = generalized_residuals(data, model, cover, parse_edge_rule(cfg.model.edge_rule), rng);
  const auto t = compute_statistics(empirical_process(res), cfg.null.r);

  json ks = json::array();
  for (std::size_t k = 0; k < res.q(); ++k) {
    const auto& u = res.per_conclique[k];
    const double d = ks_uniform_distance(u);
    ks.push_back({{"n", u.size()}, {"d", d}, {"p", kolmogorov_pvalue(d, u.size())}});
  }
  json j = envelope("residuals", cfg);
  j["nTotal"] = res.n_total;
  j["t"] = stats_json(t);
  j["ksUniformity"] = ks;
  emit(j, cfg);

  if (!cfg.csv.empty()) {
    auto out = open_csv(cfg.csv);
    out << "site,conclique,u\n";
    for (std::size_t k = 0; k < res.q(); ++k) {
      for (std::size_t i = 0; i < res.cells[k].size(); ++i) {
        const auto p = data.window.point_at(res.cells[k][i]);
        std::string site;
        for (std::size_t c = 0; c < p.dim(); ++c) site += (c ? ":" : "") + std::to_string(p[c]);
        out << site << "," << k + 1 << "," << num(res.per_conclique[k][i]) << "\n";
      }
    }
  }
}

void cmd_null_dist(const RunConfig& cfg) {
  const auto model = cfg.model.model();
  model.validate();
  const auto cover = build_cover(model.neighborhood);
  const auto spec = covariance_spec(cfg, model, cover);
  auto opts = cfg.null_options();
  opts.seed = cfg.require_seed("null-dist");
  const auto table = simulate_null_quantiles(spec, opts);
  json j = envelope("null-dist", cfg);
  j["null"] = table_json(table);
  emit(j, cfg);

  if (!cfg.csv.empty()) {
    auto out = open_csv(cfg.csv);
    out << "replicate,T1,T2,T3,T4\n";
    for (std::size_t i = 0; i < table.draws[0].size(); ++i) {
      out << i + 1;
      for (std::size_t f = 0; f < 4; ++f) out << "," << num(table.draws[f][i]);
      out << "\n";
    }
  }
}

void cmd_test_simple(const RunConfig& cfg) {
  const auto data = load_data(cfg);
  const auto model = cfg.model.model();
  check_theta(model, data.window);
  const auto cover = build_cover(model.neighborhood);
  const std::uint64_t seed = cfg.require_seed("test-simple");
  RandomStream rng(seed, "residual-a-field");
  const auto res = generalized_residuals(data, model, cover, parse_edge_rule(cfg.model.edge_rule), rng);
  const auto t = compute_statistics(empirical_process(res), cfg.null.r);

  const auto spec = covariance_spec(cfg, model, cover);
  auto opts = cfg.null_options();
  opts.seed = seed;
  const auto table = simulate_null_quantiles(spec, opts);
  const auto p = p_value(t, table);

  json q95, q99;
  for (std::size_t f = 0; f < 4; ++f) {
    q95.push_back(table.quantile(f, 0.95));
    q99.push_back(table.quantile(f, 0.99));
  }
  json j = envelope("test-simple", cfg);
  j["nTotal"] = res.n_total;
  j["t"] = stats_json(t);
  j["p"] = p;
  j["q95"] = q95;
  j["q99"] = q99;
  emit(j, cfg);
}

void cmd_test_composite(const RunConfig& cfg) {
  const auto data = load_data(cfg);
  const auto m = NeighborhoodTemplate::parse(cfg.model.neighborhood);
  if (cfg.model.family != "gaussian") throw ConfigError("test-composite supports the gaussian family only");
  const auto cover = build_cover(m);
  auto bc = cfg.bootstrap_config();
  bc.seed = cfg.require_seed("test-composite");
  const auto r = composite_test(data, m, cover, bc);

  json j = envelope("test-composite", cfg);
  j["fit"] = fit_json(r.fit);
  j["t"] = stats_json(r.observed);
  j["p"] = r.p_values;
  j["intervals"] = {{"level", bc.level},
                    {"alpha", {r.intervals[0].lower, r.intervals[0].upper}},
                    {"eta", {r.intervals[1].lower, r.intervals[1].upper}},
                    {"tau2", {r.intervals[2].lower, r.intervals[2].upper}}};
  j["kept"] = r.kept;
  j["dropped"] = r.dropped;
  emit(j, cfg);

  if (!cfg.csv.empty()) {
    auto out = open_csv(cfg.csv);
    out << "replicate,T1,T2,T3,T4,alpha,eta,tau2\n";
    for (Eigen::Index b = 0; b < r.replicate_stats.rows(); ++b) {
      out << b + 1;
      for (Eigen::Index f = 0; f < 4; ++f) out << "," << num(r.replicate_stats(b, f));
      for (Eigen::Index k = 0; k < 3; ++k) out << "," << num(r.parameter_draws(b, k));
      out << "\n";
    }
  }
}

void cmd_study_table1(const RunConfig& cfg) {
  auto s = cfg.study_options();
  s.seed = cfg.require_seed("study-table1");
  const auto rows = study_table1(s);
  json j = envelope("study-table1", cfg);
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"eta", r.eta}, {"N", r.n_sites}, {"functional", r.functional}, {"level", r.level},
                   {"proportion", r.proportion}, {"mcSe", r.mc_se}});
  }
  j["rows"] = arr;
  emit(j, cfg);
  if (!cfg.csv.empty()) {
    auto out = open_csv(cfg.csv);
    out << "eta,N,functional,level,proportion,mc_se\n";
    for (const auto& r : rows) {
      out << num(r.eta) << "," << r.n_sites << ",T" << r.functional << "," << num(r.level) << ","
          << num(r.proportion) << "," << num(r.mc_se) << "\n";
    }
  }
}

void cmd_study_distance(const RunConfig& cfg) {
  auto s = cfg.study_options();
  s.seed = cfg.require_seed("study-distance");
  const auto rows = study_distance(s);
  json j = envelope("study-distance", cfg);
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"eta", r.eta}, {"N", r.n_sites}, {"functional", r.functional}, {"comparison", r.comparison},
                   {"dKs", r.d_ks}, {"dCm", r.d_cm}});
  }
  j["rows"] = arr;
  emit(j, cfg);
  if (!cfg.csv.empty()) {
    auto out = open_csv(cfg.csv);
    out << "eta,N,functional,comparison,d_ks,d_cm,d_ks_x1000,d_cm_x1000\n";
    for (const auto& r : rows) {
      out << num(r.eta) << "," << r.n_sites << ",T" << r.functional << "," << r.comparison << "," << num(r.d_ks)
          << "," << num(r.d_cm) << "," << num(1000.0 * r.d_ks) << "," << num(1000.0 * r.d_cm) << "\n";
    }
  }
}

void cmd_power(const RunConfig& cfg) {
  auto s = cfg.study_options();
  s.seed = cfg.require_seed("power");
  const auto rows = study_power(s, cfg.study.gammas, cfg.study.eta_null);
  json j = envelope("power", cfg);
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"eta", r.eta}, {"N", r.n_sites}, {"functional", r.functional}, {"gamma", r.gamma},
                   {"power", r.power}});
  }
  j["rows"] = arr;
  emit(j, cfg);
  if (!cfg.csv.empty()) {
    auto out = open_csv(cfg.csv);
    out << "eta,N,functional,gamma,power\n";
    for (const auto& r : rows) {
      out << num(r.eta) << "," << r.n_sites << ",T" << r.functional << "," << num(r.gamma) << ","
          << num(r.power) << "\n";
    }
  }
}

}  // namespace mrfgof::cli
