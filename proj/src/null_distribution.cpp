#include "mrfgof/null_distribution.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mrfgof/errors.hpp"
#include "mrfgof/normal.hpp"
#include "mrfgof/parallel.hpp"

namespace mrfgof {

double limit_cov_g4(double u, double v, std::size_t j, std::size_t k, double eta) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
    throw ConfigError("limit_cov_g4: u and v must lie in [0,1]");
  }
  if (j > 1 || k > 1) throw ConfigError("limit_cov_g4: the four-nearest cover has two concliques");
  if (!(std::fabs(eta) < 0.25)) throw ConfigError("limit_cov_g4: |eta| must be < 0.25");
  if (u == 0.0 || u == 1.0 || v == 0.0 || v == 1.0) return 0.0;
  if (j == k) return 2.0 * (std::min(u, v) - u * v);
  return 8.0 * (bvn_cdf(normal_quantile(u), normal_quantile(v), -eta) - u * v);
}

// --- Monte Carlo cross covariance ---------------------------------------------

namespace {

std::vector<LatticePoint> unit_cube(std::size_t d) {
  std::vector<LatticePoint> out;
  std::vector<int> c(d, -1);
  while (true) {
    out.emplace_back(c);
    std::size_t i = d;
    while (i > 0 && c[i - 1] == 1) c[--i] = -1;
    if (i == 0) break;
    ++c[i - 1];
  }
  return out;
}

}  // namespace

MonteCarloCrossCovariance::MonteCarloCrossCovariance(const MrfModel& model, const ConcliqueCover& cover,
                                                     std::span<const GridData> fields,
                                                     RandomStream& rng, int min_fields) {
  if (fields.size() < static_cast<std::size_t>(std::max(min_fields, 2))) {
    throw ConfigError("Monte Carlo covariance needs at least " + std::to_string(std::max(min_fields, 2)) +
                      " fields, got " + std::to_string(fields.size()));
  }
  const auto& fam = cover.family;
  det_delta_ = 1;
  for (int d : fam.delta) det_delta_ *= d;
  for (const auto& g : cover.groups) group_sizes_.push_back(g.size());
  n_fields_ = fields.size();

  const auto cube = unit_cube(fam.neighborhood.dim());
  for (std::size_t j = 0; j < cover.q(); ++j) {
    for (std::size_t k = j + 1; k < cover.q(); ++k) {
      for (std::size_t i : cover.groups[j]) {
        for (std::size_t l : cover.groups[k]) {
          for (const auto& s : cube) {
            LatticePoint lag = fam.offsets[l] - fam.offsets[i];
            for (std::size_t c = 0; c < lag.dim(); ++c) lag[c] += fam.delta[c] * s[c];
            if (fam.neighborhood.contains_symmetric(lag)) {
              terms_.push_back({j, k, i, l, lag, {}, {}, {0}});
            }
          }
        }
      }
    }
  }

  // Cell pairs per term, fixed by the window of the first field.
  const SamplingWindow& window = fields.front().window;
  const NeighborTable table(window, model.neighborhood);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(terms_.size());
  for (std::size_t c = 0; c < window.size(); ++c) {
    if (!window.observed(c) || !table.interior(c)) continue;
    const LatticePoint x = window.point_at(c);
    const std::size_t basic = fam.index_of(x);
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      if (terms_[t].basic_i != basic) continue;
      auto other = window.index_of(x + terms_[t].lag);
      if (other && window.observed(*other) && table.interior(*other)) pairs[t].emplace_back(c, *other);
    }
  }
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    if (pairs[t].empty()) {
      throw NumericalError("window too small: no interior residual pairs at lag " +
                           to_string(terms_[t].lag));
    }
  }

  const Eigen::VectorXd grid = default_u_grid(2);
  std::vector<double> u(window.size());
  for (const auto& field : fields) {
    if (field.window.size() != window.size() || field.window.mask() != window.mask()) {
      throw ConfigError("Monte Carlo fields must share one window");
    }
    const ResidualSet res = generalized_residuals(field, model, cover, EdgeRule::interior_only, rng, grid);
    for (std::size_t j = 0; j < res.q(); ++j) {
      for (std::size_t i = 0; i < res.cells[j].size(); ++i) u[res.cells[j][i]] = res.per_conclique[j][i];
    }
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      for (const auto& [a, b] : pairs[t]) {
        terms_[t].first.push_back(static_cast<float>(u[a]));
        terms_[t].second.push_back(static_cast<float>(u[b]));
      }
      terms_[t].field_start.push_back(terms_[t].first.size());
    }
  }
}

MonteCarloCrossCovariance MonteCarloCrossCovariance::simulate(const MrfModel& model,
                                                              const SamplingWindow& window,
                                                              const ConcliqueCover& cover,
                                                              const Options& options, RandomStream& rng) {
  if (options.mc_fields < options.min_fields) {
    throw ConfigError("mc_fields below the configured minimum of " + std::to_string(options.min_fields));
  }
  GibbsOptions g = options.gibbs;
  g.n_fields = options.mc_fields;
  const auto fields = gibbs_simulate(model, window, cover, g, rng);
  return MonteCarloCrossCovariance(model, cover, fields, rng, options.min_fields);
}

MonteCarloCrossCovariance::Estimate MonteCarloCrossCovariance::covariance(double u, double v,
                                                                          std::size_t j,
                                                                          std::size_t k) const {
  if (j >= q() || k >= q()) throw ConfigError("conclique index out of range");
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw ConfigError("u, v must lie in [0,1]");
  if (j == k) {
    return {static_cast<double>(det_delta_) / static_cast<double>(group_sizes_[j]) * (std::min(u, v) - u * v),
            0.0};
  }
  if (u == 0.0 || v == 0.0 || u == 1.0 || v == 1.0) return {0.0, 0.0};
  if (j > k) {
    std::swap(j, k);
    std::swap(u, v);
  }
  const double scale = static_cast<double>(det_delta_) /
                       static_cast<double>(group_sizes_[j] * group_sizes_[k]);
  std::vector<double> per_field(n_fields_, 0.0);
  for (const auto& term : terms_) {
    if (term.group_j != j || term.group_k != k) continue;
    for (std::size_t f = 0; f < n_fields_; ++f) {
      const std::size_t b = term.field_start[f], e = term.field_start[f + 1];
      std::size_t hits = 0;
      for (std::size_t p = b; p < e; ++p) {
        if (term.first[p] <= u && term.second[p] <= v) ++hits;
      }
      per_field[f] += scale * (static_cast<double>(hits) / static_cast<double>(e - b) - u * v);
    }
  }
  const double n = static_cast<double>(n_fields_);
  double mean = 0.0;
  for (double z : per_field) mean += z;
  mean /= n;
  double ss = 0.0;
  for (double z : per_field) ss += (z - mean) * (z - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Eigen::MatrixXd MonteCarloCrossCovariance::cross_block(const Eigen::VectorXd& grid, std::size_t j,
                                                       std::size_t k) const {
  if (j == k || j >= q() || k >= q()) throw ConfigError("cross_block needs two distinct concliques");
  if (j > k) return cross_block(grid, k, j).transpose();
  const Eigen::Index g = grid.size();
  const double scale = static_cast<double>(det_delta_) /
                       static_cast<double>(group_sizes_[j] * group_sizes_[k]);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(g, g);
  const std::vector<double> gv(grid.data(), grid.data() + g);
  auto bin = [&](float x) {
    return static_cast<Eigen::Index>(std::lower_bound(gv.begin(), gv.end(), static_cast<double>(x)) - gv.begin());
  };
  for (const auto& term : terms_) {
    if (term.group_j != j || term.group_k != k) continue;
    Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(g + 1, g + 1);
    for (std::size_t p = 0; p < term.first.size(); ++p) hist(bin(term.first[p]), bin(term.second[p])) += 1.0;
    for (Eigen::Index a = 0; a <= g; ++a) {
      for (Eigen::Index b = 0; b <= g; ++b) {
        if (a > 0) hist(a, b) += hist(a - 1, b);
        if (b > 0) hist(a, b) += hist(a, b - 1);
        if (a > 0 && b > 0) hist(a, b) -= hist(a - 1, b - 1);
      }
    }
    const double n = static_cast<double>(term.first.size());
    for (Eigen::Index a = 0; a < g; ++a) {
      for (Eigen::Index b = 0; b < g; ++b) block(a, b) += scale * (hist(a, b) / n - grid[a] * grid[b]);
    }
  }
  for (Eigen::Index a = 0; a < g; ++a) {
    if (grid[a] <= 0.0 || grid[a] >= 1.0) {
      block.row(a).setZero();
      block.col(a).setZero();
    }
  }
  return block;
}

MonteCarloCrossCovariance::Estimate limit_cov_generic(const MonteCarloCrossCovariance& mc, double u,
                                                      double v, std::size_t j, std::size_t k) {
  return mc.covariance(u, v, j, k);
}

// --- limit covariance specs ----------------------------------------------------

LimitCovarianceSpec LimitCovarianceSpec::gaussian_four_nearest(double eta) {
  if (!(std::fabs(eta) < 0.25)) throw ConfigError("four-nearest Gaussian limit needs |eta| < 0.25");
  LimitCovarianceSpec s;
  s.kind = Kind::gaussian_four_nearest;
  s.eta = eta;
  s.q = 2;
  s.det_delta = 4;
  s.group_sizes = {2, 2};
  return s;
}

LimitCovarianceSpec LimitCovarianceSpec::generic(std::shared_ptr<const MonteCarloCrossCovariance> mc) {
  if (!mc) throw ConfigError("generic limit covariance needs a Monte Carlo estimate");
  LimitCovarianceSpec s;
  s.kind = Kind::generic_monte_carlo;
  s.q = mc->q();
  s.det_delta = mc->det_delta();
  s.group_sizes = mc->group_sizes();
  s.monte_carlo = std::move(mc);
  return s;
}

LimitCovarianceSpec LimitCovarianceSpec::independent(int det_delta, std::vector<std::size_t> group_sizes) {
  if (group_sizes.empty() || det_delta < 1) throw ConfigError("invalid conclique structure");
  LimitCovarianceSpec s;
  s.kind = Kind::independent;
  s.q = group_sizes.size();
  s.det_delta = det_delta;
  s.group_sizes = std::move(group_sizes);
  return s;
}

double LimitCovarianceSpec::bridge_scale(std::size_t j) const {
  return static_cast<double>(det_delta) / static_cast<double>(group_sizes.at(j));
}

double limit_covariance(const LimitCovarianceSpec& spec, double u, double v, std::size_t j, std::size_t k) {
  if (j >= spec.q || k >= spec.q) throw ConfigError("conclique index out of range");
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw ConfigError("u, v must lie in [0,1]");
  if (j == k) return spec.bridge_scale(j) * (std::min(u, v) - u * v);
  switch (spec.kind) {
    case LimitCovarianceSpec::Kind::gaussian_four_nearest: return limit_cov_g4(u, v, j, k, spec.eta);
    case LimitCovarianceSpec::Kind::generic_monte_carlo: return spec.monte_carlo->covariance(u, v, j, k).value;
    case LimitCovarianceSpec::Kind::independent: return 0.0;
  }
  return 0.0;
}

Eigen::MatrixXd limit_covariance_matrix(const LimitCovarianceSpec& spec, const Eigen::VectorXd& grid) {
  const Eigen::Index g = grid.size();
  const auto q = static_cast<Eigen::Index>(spec.q);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(q * g, q * g);
  for (Eigen::Index j = 0; j < q; ++j) {
    const double c = spec.bridge_scale(static_cast<std::size_t>(j));
    for (Eigen::Index a = 0; a < g; ++a) {
      for (Eigen::Index b = 0; b < g; ++b) {
        cov(j * g + a, j * g + b) = c * (std::min(grid[a], grid[b]) - grid[a] * grid[b]);
      }
    }
  }
  if (spec.kind == LimitCovarianceSpec::Kind::independent) return cov;
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index k = j + 1; k < q; ++k) {
      Eigen::MatrixXd block(g, g);
      if (spec.kind == LimitCovarianceSpec::Kind::gaussian_four_nearest) {
        Eigen::VectorXd z(g);
        for (Eigen::Index a = 0; a < g; ++a) z[a] = normal_quantile(grid[a]);
        for (Eigen::Index a = 0; a < g; ++a) {
          for (Eigen::Index b = a; b < g; ++b) {
            const bool edge = grid[a] <= 0.0 || grid[a] >= 1.0 || grid[b] <= 0.0 || grid[b] >= 1.0;
            const double val = edge ? 0.0 : 8.0 * (bvn_cdf(z[a], z[b], -spec.eta) - grid[a] * grid[b]);
            block(a, b) = val;
            block(b, a) = val;
          }
        }
      } else {
        block = spec.monte_carlo->cross_block(grid, static_cast<std::size_t>(j), static_cast<std::size_t>(k));
      }
      cov.block(j * g, k * g, g, g) = block;
      cov.block(k * g, j * g, g, g) = block.transpose();
    }
  }
  return cov;
}

// --- simulation of the limit functionals ---------------------------------------

double NullQuantileTable::quantile(std::size_t f, double level) const {
  std::vector<double> s = draws.at(f);
  return quantile_type7(std::move(s), level);
}

double quantile_type7_sorted(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw ConfigError("quantile level outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_type7(std::vector<double> sample, double level) {
  std::sort(sample.begin(), sample.end());
  return quantile_type7_sorted(sample, level);
}

namespace {

constexpr int kBlockReplicates = 256;

struct Factor {
  Eigen::MatrixXd matrix;
  bool triangular = true;
  double jitter = 0.0;
  bool clipped = false;
};

Factor factorize(const Eigen::MatrixXd& cov, bool allow_clipping) {
  const Eigen::Index n = cov.rows();
  for (double jitter = 1e-12; jitter <= 1e-8 * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) return {llt.matrixL(), true, jitter, false};
  }
  if (!allow_clipping) {
    throw NumericalError("limit covariance is not positive semidefinite within jitter 1e-8");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of the limit covariance failed");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return {es.eigenvectors() * root.asDiagonal(), false, 0.0, true};
}

}  // namespace

NullQuantileTable simulate_null_quantiles(const LimitCovarianceSpec& spec,
                                          const NullSimulationOptions& options) {
  if (options.grid_size < 64) throw ConfigError("grid size G must be >= 64");
  if (options.replicates < 100) throw ConfigError("replicates R must be >= 100");
  if (!(options.r >= 1.0)) throw ConfigError("norm order r must be >= 1");
  for (double l : options.levels) {
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("quantile levels must lie in (0,1)");
  }

  const int g = options.grid_size;
  const double h = 1.0 / (g + 1);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(g, h, g * h);
  const Eigen::MatrixXd cov = limit_covariance_matrix(spec, grid);
  const Factor factor =
      factorize(cov, spec.kind == LimitCovarianceSpec::Kind::generic_monte_carlo);

  const auto q = static_cast<Eigen::Index>(spec.q);
  const std::size_t n_rep = static_cast<std::size_t>(options.replicates);
  const std::size_t n_blocks = (n_rep + kBlockReplicates - 1) / kBlockReplicates;

  NullQuantileTable table;
  table.config = options;
  table.levels = options.levels;
  table.jitter = factor.jitter;
  table.eigen_clipped = factor.clipped;
  for (auto& d : table.draws) d.assign(n_rep, 0.0);

  parallel_for(n_blocks, options.threads, [&](std::size_t b) {
    RandomStream rng(options.seed, "null-dist", b);
    const std::size_t first = b * kBlockReplicates;
    const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(kBlockReplicates, n_rep - first));
    Eigen::MatrixXd z(q * g, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index i = 0; i < q * g; ++i) z(i, c) = rng.normal();
    }
    Eigen::MatrixXd x;
    if (factor.triangular) {
      x = factor.matrix.triangularView<Eigen::Lower>() * z;
    } else {
      x = factor.matrix * z;
    }
    std::vector<double> sups(spec.q), integrals(spec.q);
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index j = 0; j < q; ++j) {
        const double var_rate = spec.bridge_scale(static_cast<std::size_t>(j));
        double sup = 0.0, integral = 0.0, prev = 0.0;
        for (Eigen::Index i = 0; i <= g; ++i) {
          const double cur = i < g ? x(j * g + i, c) : 0.0;
          if (options.bridge_sup) {
            const double d2 = (cur - prev) * (cur - prev);
            const double hi = 0.5 * (prev + cur + std::sqrt(d2 - 2.0 * var_rate * h * std::log(1.0 - rng.uniform())));
            const double lo = 0.5 * (prev + cur - std::sqrt(d2 - 2.0 * var_rate * h * std::log(1.0 - rng.uniform())));
            sup = std::max({sup, hi, -lo});
          } else {
            sup = std::max(sup, std::fabs(cur));
          }
          if (i < g) integral += h * std::pow(std::fabs(cur), options.r);
          prev = cur;
        }
        sups[static_cast<std::size_t>(j)] = sup;
        integrals[static_cast<std::size_t>(j)] = integral;
      }
      const GofStatistics t = combine_functionals(sups, integrals, options.r);
      for (std::size_t f = 0; f < 4; ++f) table.draws[f][first + static_cast<std::size_t>(c)] = t[f];
    }
  });

  for (std::size_t f = 0; f < 4; ++f) {
    std::vector<double> sorted = table.draws[f];
    std::sort(sorted.begin(), sorted.end());
    for (double l : table.levels) table.quantiles[f].push_back(quantile_type7_sorted(sorted, l));
  }
  return table;
}

std::array<double, 4> p_value(const GofStatistics& observed, const NullQuantileTable& table) {
  std::array<double, 4> p{};
  for (std::size_t f = 0; f < 4; ++f) {
    const auto& d = table.draws[f];
    if (d.empty()) throw ConfigError("p_value: empty null table");
    const auto hits = std::count_if(d.begin(), d.end(), [&](double x) { return x >= observed[f]; });
    p[f] = (1.0 + static_cast<double>(hits)) / (static_cast<double>(d.size()) + 1.0);
  }
  return p;
}

// --- distances between samples -------------------------------------------------

namespace {

template <typename Visit>
void walk_ecdfs(std::span<const double> a, std::span<const double> b, Visit&& visit) {
  if (a.empty() || b.empty()) throw ConfigError("distance between empty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t i = 0, k = 0;
  while (i < sa.size() || k < sb.size()) {
    double t;
    if (k >= sb.size() || (i < sa.size() && sa[i] <= sb[k])) t = sa[i];
    else t = sb[k];
    while (i < sa.size() && sa[i] <= t) ++i;
    while (k < sb.size() && sb[k] <= t) ++k;
    double next = t;
    if (i < sa.size() || k < sb.size()) {
      next = std::min(i < sa.size() ? sa[i] : sb[k], k < sb.size() ? sb[k] : sa[i]);
    }
    // F_a - F_b is constant on [t, next).
    visit(static_cast<double>(i) / na - static_cast<double>(k) / nb, next - t);
  }
}

}  // namespace

double ks_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  walk_ecdfs(a, b, [&](double diff, double) { d = std::max(d, std::fabs(diff)); });
  return d;
}

double cm_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  walk_ecdfs(a, b, [&](double diff, double width) { s += diff * diff * width; });
  return std::sqrt(s);
}

}  // namespace mrfgof
