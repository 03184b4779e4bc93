#include "mrfgof/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrfgof/errors.hpp"

namespace mrfgof {

Eigen::VectorXd default_u_grid(Eigen::Index points) {
  if (points < 2) throw ConfigError("u grid needs at least two points");
  return Eigen::VectorXd::LinSpaced(points, 0.0, 1.0);
}

std::vector<double> draw_a_field(const SamplingWindow& window, RandomStream& rng) {
  std::vector<double> a(window.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c : window.observed_indices()) a[c] = rng.uniform();
  return a;
}

ResidualSet generalized_residuals(const GridData& data, const MrfModel& model,
                                  const ConcliqueCover& cover, EdgeRule edge_rule,
                                  std::span<const double> a_field, const Eigen::VectorXd& u_grid) {
  model.validate();
  if (a_field.size() != data.window.size()) {
    throw ConfigError("auxiliary uniform field does not match the data window");
  }
  for (Eigen::Index i = 0; i < u_grid.size(); ++i) {
    if (u_grid[i] < 0.0 || u_grid[i] > 1.0 || (i > 0 && u_grid[i] <= u_grid[i - 1])) {
      throw ConfigError("u grid must be strictly increasing inside [0,1]");
    }
  }
  const auto scope = edge_rule == EdgeRule::interior_only ? LabelScope::interior_only
                                                          : LabelScope::all_observed;
  const auto labels = assign_labels(data.window, model.neighborhood, cover, scope);
  const NeighborTable table(data.window, model.neighborhood);

  ResidualSet out;
  out.per_conclique.resize(labels.q);
  out.cells.resize(labels.q);
  out.u_grid = u_grid;
  std::vector<double> nb;
  nb.reserve(model.neighborhood.size());
  for (std::size_t c = 0; c < data.window.size(); ++c) {
    if (labels.label[c] < 0) continue;
    nb.clear();
    for (std::size_t t : table.neighbors(c)) nb.push_back(data[t]);
    const double y = data[c];
    const double f = conditional_cdf(model, y, nb);
    const double a = a_field[c];
    double u = f;
    if (!model.is_continuous()) u = (1.0 - a) * f + a * conditional_cdf_left(model, y, nb);
    const auto j = static_cast<std::size_t>(labels.label[c]);
    out.per_conclique[j].push_back(std::clamp(u, 0.0, 1.0));
    out.cells[j].push_back(c);
    ++out.n_total;
  }
  return out;
}

ResidualSet generalized_residuals(const GridData& data, const MrfModel& model,
                                  const ConcliqueCover& cover, EdgeRule edge_rule,
                                  RandomStream& rng, const Eigen::VectorXd& u_grid) {
  const auto a = draw_a_field(data.window, rng);
  return generalized_residuals(data, model, cover, edge_rule, a, u_grid);
}

EmpiricalProcessSet empirical_process(const ResidualSet& residuals) {
  EmpiricalProcessSet out;
  out.u_grid = residuals.u_grid;
  out.n_total = residuals.n_total;
  const double scale = std::sqrt(static_cast<double>(residuals.n_total));
  for (std::size_t j = 0; j < residuals.q(); ++j) {
    std::vector<double> s = residuals.per_conclique[j];
    if (s.empty()) {
      throw DataError("conclique " + std::to_string(j + 1) + " has no residual sites");
    }
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    Eigen::VectorXd w(out.u_grid.size());
    std::size_t below = 0;
    for (Eigen::Index i = 0; i < out.u_grid.size(); ++i) {
      const double u = out.u_grid[i];
      while (below < s.size() && s[below] <= u) ++below;
      w[i] = scale * (static_cast<double>(below) / n - u);
    }
    out.w.push_back(std::move(w));
    out.sorted_residuals.push_back(std::move(s));
  }
  return out;
}

double GofStatistics::operator[](std::size_t i) const {
  switch (i) {
    case 0: return t1;
    case 1: return t2;
    case 2: return t3;
    case 3: return t4;
    default: throw std::out_of_range("GofStatistics index");
  }
}

GofStatistics combine_functionals(std::span<const double> sups, std::span<const double> integrals,
                                  double r) {
  const double q = static_cast<double>(sups.size());
  GofStatistics t;
  t.r = r;
  double sq = 0.0;
  for (double s : sups) {
    t.t1 = std::max(t.t1, s);
    sq += s * s;
  }
  t.t2 = std::sqrt(sq / q);
  double sum = 0.0;
  for (double in : integrals) {
    const double norm = std::pow(in, 1.0 / r);
    t.t3 = std::max(t.t3, norm);
    sum += norm;
  }
  t.t4 = sum / q;
  return t;
}

double ks_uniform_distance(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double u = sample[i];
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

GofStatistics compute_statistics(const EmpiricalProcessSet& processes, double r) {
  if (!(r >= 1.0)) throw ConfigError("norm order r must be >= 1");
  const double scale = std::sqrt(static_cast<double>(processes.n_total));
  const auto& u = processes.u_grid;
  std::vector<double> sups, integrals;
  for (std::size_t j = 0; j < processes.q(); ++j) {
    const Eigen::VectorXd& w = processes.w[j];
    double sup = scale * ks_uniform_distance(processes.sorted_residuals[j]);
    sup = std::max(sup, w.cwiseAbs().maxCoeff());
    sups.push_back(sup);

    const Eigen::ArrayXd f = w.array().abs().pow(r);
    double integral = 0.0;
    for (Eigen::Index i = 0; i + 1 < u.size(); ++i) {
      integral += 0.5 * (u[i + 1] - u[i]) * (f[i] + f[i + 1]);
    }
    integrals.push_back(integral);
  }
  return combine_functionals(sups, integrals, r);
}

}  // namespace mrfgof
