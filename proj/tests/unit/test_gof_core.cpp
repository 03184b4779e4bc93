#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <gtest/gtest.h>

#include "mrfgof/errors.hpp"
#include "mrfgof/gibbs.hpp"
#include "mrfgof/kolmogorov.hpp"
#include "mrfgof/normal.hpp"
#include "mrfgof/residuals.hpp"

using namespace mrfgof;

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth,
                        double fa, double fm, double fb, double whole) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, eps / 2, depth - 1, fa, flm, fm, left) +
         adaptive_simpson(f, m, b, eps / 2, depth - 1, fm, frm, fb, right);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, eps, 40, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb));
}

// Direct 2-D integration of the bivariate normal density over (-9, h] x (-9, k].
double bvn_quadrature(double h, double k, double rho) {
  const double c = 1.0 / (2.0 * std::numbers::pi * std::sqrt(1.0 - rho * rho));
  return integrate(
      [&](double x) {
        return integrate(
            [&](double y) { return c * std::exp(-(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho * rho))); }, -9.0,
            k, 1e-12);
      },
      -9.0, h, 1e-11);
}

ResidualSet make_residuals(std::vector<std::vector<double>> per) {
  ResidualSet r;
  r.u_grid = default_u_grid();
  for (const auto& p : per) r.n_total += p.size();
  r.cells.resize(per.size());
  r.per_conclique = std::move(per);
  return r;
}

}  // namespace

TEST(Normal, QuantileInvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13 * std::max(1.0, p / (1 - p)));
  }
  EXPECT_TRUE(std::isinf(normal_quantile(0.0)));
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
}

TEST(Bvn, IndependenceFactorizes) {
  for (double h : {-1.3, 0.0, 0.7}) {
    for (double k : {-0.4, 2.1}) EXPECT_NEAR(bvn_cdf(h, k, 0.0), normal_cdf(h) * normal_cdf(k), 1e-14);
  }
}

TEST(Bvn, OrthantIdentity) {
  for (double rho : {-0.99, -0.5, -0.24, 0.0, 0.1, 0.24, 0.8, 0.95}) {
    EXPECT_NEAR(bvn_cdf(0, 0, rho), 0.25 + std::asin(rho) / (2 * std::numbers::pi), 1e-12) << rho;
  }
}

TEST(Bvn, MatchesQuadratureOracle) {
  EXPECT_NEAR(bvn_cdf(0.5, -0.3, 0.6), bvn_quadrature(0.5, -0.3, 0.6), 1e-7);
  EXPECT_NEAR(bvn_cdf(0.5, -0.3, 0.6), 0.3436225301112108, 1e-9);
  for (double rho : {-0.9, -0.24, 0.3, 0.85}) {
    EXPECT_NEAR(bvn_cdf(-1.1, 0.4, rho), bvn_quadrature(-1.1, 0.4, rho), 1e-7) << rho;
    EXPECT_NEAR(bvn_cdf(1.7, 2.2, rho), bvn_quadrature(1.7, 2.2, rho), 1e-7) << rho;
  }
}

TEST(Bvn, LimitsAndErrors) {
  EXPECT_NEAR(bvn_cdf(INFINITY, 0.3, 0.4), normal_cdf(0.3), 1e-15);
  EXPECT_EQ(bvn_cdf(-INFINITY, 0.3, 0.4), 0.0);
  EXPECT_THROW(bvn_cdf(0, 0, 1.0), ConfigError);
  EXPECT_THROW(bvn_cdf(0, 0, -1.2), ConfigError);
}

TEST(Kolmogorov, KnownValues) {
  // classical asymptotic 95% point
  EXPECT_NEAR(kolmogorov_cdf(1.3581 / std::sqrt(10000.0), 10000), 0.95, 2e-3);
  // n = 1: D = max(U, 1-U), P(D < d) = 2d - 1 for d in [1/2, 1]
  EXPECT_NEAR(kolmogorov_cdf(0.8, 1), 0.6, 1e-12);
  EXPECT_NEAR(kolmogorov_pvalue(0.0, 5), 1.0, 1e-15);
}

TEST(Residuals, GaussianExampleAndIgnoresA) {
  const auto m = NeighborhoodTemplate::nearest(2);
  const MrfModel model{GaussianMrf{0.0, 0.1, 1.0}, m};
  const auto w = SamplingWindow::grid(3, 3);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(9);
  v[4] = 0.4;
  const GridData data(w, v);
  const auto cover = build_cover(m);
  RandomStream r1(1), r2(2);
  const auto a = generalized_residuals(data, model, cover, EdgeRule::interior_only, r1);
  const auto b = generalized_residuals(data, model, cover, EdgeRule::interior_only, r2);
  ASSERT_EQ(a.n_total, 1u);
  EXPECT_NEAR(a.per_conclique[0][0], 0.5, 1e-15);
  EXPECT_EQ(a.per_conclique, b.per_conclique);
  const auto t = generalized_residuals(data, model, cover, EdgeRule::truncated_neighbors, r1);
  EXPECT_EQ(t.n_total, 9u);
  for (const auto& p : t.per_conclique) {
    for (double u : p) {
      EXPECT_GE(u, 0.0);
      EXPECT_LE(u, 1.0);
    }
  }
}

TEST(Residuals, BinaryUsesRandomization) {
  const auto m = NeighborhoodTemplate::nearest(2);
  const MrfModel model{AutologisticMrf{-0.5, 0.4}, m};
  const auto w = SamplingWindow::grid(6, 6);
  const auto cover = build_cover(m);
  RandomStream rng(4);
  const auto field = gibbs_simulate(model, w, cover, {50, 1, 1, SweepOrder::conclique}, rng).front();
  const NeighborTable table(w, m);
  const auto a = draw_a_field(w, rng);
  const auto res = generalized_residuals(field, model, cover, EdgeRule::truncated_neighbors, a);
  for (std::size_t j = 0; j < res.q(); ++j) {
    for (std::size_t i = 0; i < res.cells[j].size(); ++i) {
      const std::size_t c = res.cells[j][i];
      std::vector<double> nb;
      for (std::size_t t : table.neighbors(c)) nb.push_back(field[t]);
      const double f = conditional_cdf(model, field[c], nb), fl = conditional_cdf_left(model, field[c], nb);
      EXPECT_NEAR(res.per_conclique[j][i], (1 - a[c]) * f + a[c] * fl, 1e-15);
    }
  }
}

TEST(Residuals, TrueModelGivesUniformResidualsPerConclique) {
  const auto m = NeighborhoodTemplate::nearest(2);
  const MrfModel model{GaussianMrf{0.0, 0.2, 1.0}, m};
  const auto w = SamplingWindow::grid(20, 20);
  const auto cover = build_cover(m);
  RandomStream rng(8);
  const auto fields = gibbs_simulate(model, w, cover, {300, 10, 200, SweepOrder::conclique}, rng);
  int rejections = 0;
  for (const auto& f : fields) {
    const auto res = generalized_residuals(f, model, cover, EdgeRule::truncated_neighbors, rng);
    for (const auto& u : res.per_conclique) rejections += kolmogorov_pvalue(ks_uniform_distance(u), u.size()) < 0.05;
  }
  // 400 tests at 5%: binomial mean 20, sd 4.4
  EXPECT_GE(rejections, 7);
  EXPECT_LE(rejections, 34);
}

TEST(EmpiricalProcess, SmallExample) {
  auto r = make_residuals({{0.25, 0.75}, {0.1, 0.9}});
  r.u_grid = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  const auto p = empirical_process(r);
  EXPECT_NEAR(p.w[0][2], 0.0, 1e-15);
  EXPECT_NEAR(p.w[0][4], 0.0, 1e-15);
  EXPECT_NEAR(p.w[1][4], 0.0, 1e-15);
  EXPECT_NEAR(p.w[0][1], 2.0 * (0.5 - 0.25), 1e-15);
}

TEST(EmpiricalProcess, EmptyConcliqueThrows) {
  EXPECT_THROW(empirical_process(make_residuals({{0.5}, {}})), DataError);
}

TEST(EmpiricalProcess, QuantileResidualsAreNearZero) {
  std::vector<double> u;
  for (int i = 1; i <= 1000; ++i) u.push_back(i / 1001.0);
  const auto p = empirical_process(make_residuals({u}));
  const double grid_slack = std::sqrt(1000.0) / 1023.0;
  EXPECT_LE(p.w[0].cwiseAbs().maxCoeff(), std::sqrt(1000.0) / 1001.0 + grid_slack);
  const auto t = compute_statistics(p);
  EXPECT_NEAR(t.t1, std::sqrt(1000.0) * 1.0 / 1001.0, 1e-12);
}

TEST(Statistics, ZeroProcessAndSingleConclique) {
  EmpiricalProcessSet p;
  p.u_grid = default_u_grid();
  p.n_total = 4;
  std::vector<double> s{0.0, 0.0};
  auto t = combine_functionals(s, s, 2.0);
  EXPECT_EQ(t.t1 + t.t2 + t.t3 + t.t4, 0.0);
  const auto one = compute_statistics(empirical_process(make_residuals({{0.1, 0.4, 0.45, 0.9}})));
  EXPECT_DOUBLE_EQ(one.t1, one.t2);
  EXPECT_DOUBLE_EQ(one.t3, one.t4);
}

TEST(Statistics, HandEvaluatedTwoConcliqueCase) {
  // W_1 = 1 on (0,1), W_2 = 0
  const std::vector<double> sups{1.0, 0.0}, integrals{1.0, 0.0};
  const auto t = combine_functionals(sups, integrals, 2.0);
  EXPECT_DOUBLE_EQ(t.t1, 1.0);
  EXPECT_DOUBLE_EQ(t.t2, 1.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(t.t3, 1.0);
  EXPECT_DOUBLE_EQ(t.t4, 0.5);
  EXPECT_THROW(compute_statistics(empirical_process(make_residuals({{0.5}})), 0.5), ConfigError);
}

TEST(Statistics, ExactSupMatchesKsFormula) {
  RandomStream rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + rep % 13;
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& x : u) x = rng.uniform();
    std::vector<double> s = u;
    std::sort(s.begin(), s.end());
    double d = 0.0;
    for (int i = 1; i <= n; ++i) {
      d = std::max({d, std::fabs(static_cast<double>(i) / n - s[static_cast<std::size_t>(i - 1)]),
                    std::fabs(static_cast<double>(i - 1) / n - s[static_cast<std::size_t>(i - 1)])});
    }
    const auto t = compute_statistics(empirical_process(make_residuals({u})));
    EXPECT_NEAR(t.t1, std::sqrt(static_cast<double>(n)) * d, 1e-12);
    std::reverse(u.begin(), u.end());
    const auto t2 = compute_statistics(empirical_process(make_residuals({u})));
    EXPECT_EQ(t.t1, t2.t1);
    EXPECT_EQ(t.t3, t2.t3);
  }
}

TEST(Statistics, NormInequalities) {
  RandomStream rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<std::vector<double>> per(3);
    for (auto& p : per) {
      for (int i = 0; i < 20; ++i) p.push_back(std::pow(rng.uniform(), 1.0 + rep * 0.05));
    }
    const auto t = compute_statistics(empirical_process(make_residuals(per)));
    EXPECT_LE(t.t2, t.t1 + 1e-15);
    EXPECT_LE(t.t1, std::sqrt(3.0) * t.t2 + 1e-12);
    EXPECT_LE(t.t4, t.t3 + 1e-15);
    EXPECT_LE(t.t3, 3.0 * t.t4 + 1e-12);
  }
}

TEST(EmpiricalProcess, VarianceScaleAtOneHalf) {
  // q = 2 concliques of 50 uniforms, N = 100: Var W_1(0.5) = (100/50) * 0.25
  RandomStream rng(31);
  const int reps = 10000;
  double sum = 0.0, ss = 0.0;
  Eigen::VectorXd grid(1);
  grid << 0.5;
  for (int r = 0; r < reps; ++r) {
    std::vector<std::vector<double>> per(2);
    for (auto& p : per) {
      for (int i = 0; i < 50; ++i) p.push_back(rng.uniform());
    }
    auto res = make_residuals(per);
    res.u_grid = grid;
    const double w = empirical_process(res).w[0][0];
    sum += w;
    ss += w * w;
  }
  const double mean = sum / reps, var = ss / reps - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(0.5 / reps));
  EXPECT_NEAR(var, 0.5, 3.0 * 0.5 * std::sqrt(2.0 / reps));
}
