#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "mrfgof/errors.hpp"
#include "mrfgof/null_distribution.hpp"

using namespace mrfgof;

TEST(LimitCovG4, Examples) {
  EXPECT_DOUBLE_EQ(limit_cov_g4(0.5, 0.5, 0, 0, 0.1), 0.5);
  for (double u : {0.1, 0.4, 0.9}) EXPECT_NEAR(limit_cov_g4(u, 0.3, 0, 1, 0.0), 0.0, 1e-14);
  EXPECT_NEAR(limit_cov_g4(0.5, 0.5, 0, 1, 0.24), 4.0 / std::numbers::pi * std::asin(-0.24), 1e-12);
  EXPECT_NEAR(limit_cov_g4(0.5, 0.5, 0, 1, 0.24), -0.3086, 1e-4);
  EXPECT_EQ(limit_cov_g4(0.0, 0.5, 0, 1, 0.2), 0.0);
  EXPECT_EQ(limit_cov_g4(0.3, 1.0, 1, 0, 0.2), 0.0);
}

TEST(LimitCovG4, SymmetryAndErrors) {
  for (double u : {0.05, 0.3, 0.77}) {
    for (double v : {0.2, 0.5, 0.95}) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
          EXPECT_NEAR(limit_cov_g4(u, v, j, k, 0.17), limit_cov_g4(v, u, k, j, 0.17), 1e-14);
        }
      }
    }
  }
  EXPECT_THROW(limit_cov_g4(1.2, 0.5, 0, 0, 0.1), ConfigError);
  EXPECT_THROW(limit_cov_g4(0.5, 0.5, 2, 0, 0.1), ConfigError);
  EXPECT_THROW(limit_cov_g4(0.5, 0.5, 0, 1, 0.25), ConfigError);
}

TEST(LimitCovarianceMatrix, SymmetricPsdWithinJitter) {
  for (double eta : {-0.24, 0.0, 0.1, 0.24}) {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(256, 1.0 / 257, 256.0 / 257);
    const auto c = limit_covariance_matrix(LimitCovarianceSpec::gaussian_four_nearest(eta), grid);
    EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-8) << eta;
    EXPECT_NEAR(c(3, 3), 2.0 * (grid[3] - grid[3] * grid[3]), 1e-15);
  }
}

TEST(MonteCarloCovariance, IndicatorStructureAndDiagonal) {
  const auto m = NeighborhoodTemplate::nearest(2);
  const auto cover = build_cover(m);
  RandomStream rng(2);
  MonteCarloCrossCovariance::Options o;
  o.mc_fields = 100;
  o.gibbs.burn_in = 100;
  const auto mc = MonteCarloCrossCovariance::simulate({GaussianMrf{0, 0.1, 1}, m}, SamplingWindow::grid(12, 12),
                                                      cover, o, rng);
  // every enumerated lag is a neighbor offset, and all 4 x 2 x 2 of them appear
  EXPECT_EQ(mc.terms().size(), 8u);
  for (const auto& t : mc.terms()) EXPECT_TRUE(m.contains_symmetric(t.lag));
  EXPECT_EQ(mc.covariance(0.0, 0.4, 0, 1).value, 0.0);
  EXPECT_EQ(mc.covariance(0.4, 0.0, 1, 0).value, 0.0);
  EXPECT_DOUBLE_EQ(mc.covariance(0.3, 0.6, 1, 1).value, 2.0 * (0.3 - 0.18));
  EXPECT_DOUBLE_EQ(mc.covariance(0.3, 0.6, 0, 1).value, mc.covariance(0.6, 0.3, 1, 0).value);
  EXPECT_EQ(mc.terms()[0].field_start.size(), 101u);
}

TEST(MonteCarloCovariance, EightNearestSkipsNonNeighborLags) {
  const auto m = NeighborhoodTemplate::chebyshev(2);
  const auto cover = build_cover(m);
  RandomStream rng(3);
  MonteCarloCrossCovariance::Options o;
  o.mc_fields = 100;
  o.gibbs.burn_in = 50;
  const auto mc = MonteCarloCrossCovariance::simulate({GaussianMrf{0, 0.05, 1}, m}, SamplingWindow::grid(10, 10),
                                                      cover, o, rng);
  // brute force: count (i in J_j, l in J_k, s) with a_l - a_i + Delta s in +-M
  std::size_t expected = 0;
  const auto& f = cover.family;
  for (std::size_t j = 0; j < cover.q(); ++j) {
    for (std::size_t k = j + 1; k < cover.q(); ++k) {
      for (std::size_t i : cover.groups[j]) {
        for (std::size_t l : cover.groups[k]) {
          for (int s0 = -1; s0 <= 1; ++s0) {
            for (int s1 = -1; s1 <= 1; ++s1) {
              const LatticePoint lag{f.offsets[l][0] - f.offsets[i][0] + 2 * s0,
                                     f.offsets[l][1] - f.offsets[i][1] + 2 * s1};
              expected += m.contains_symmetric(lag);
            }
          }
        }
      }
    }
  }
  EXPECT_EQ(mc.terms().size(), expected);
}

TEST(MonteCarloCovariance, InsufficientFieldsThrow) {
  const auto m = NeighborhoodTemplate::nearest(2);
  RandomStream rng(1);
  MonteCarloCrossCovariance::Options o;
  o.mc_fields = 10;
  EXPECT_THROW(MonteCarloCrossCovariance::simulate({GaussianMrf{0, 0.1, 1}, m}, SamplingWindow::grid(8, 8),
                                                   build_cover(m), o, rng),
               ConfigError);
}

TEST(MonteCarloCovariance, MatchesClosedFormAtCenter) {
  const auto m = NeighborhoodTemplate::nearest(2);
  RandomStream rng(4);
  MonteCarloCrossCovariance::Options o;
  o.mc_fields = 1000;
  const auto mc = MonteCarloCrossCovariance::simulate({GaussianMrf{0, 0.1, 1}, m}, SamplingWindow::grid(24, 24),
                                                      build_cover(m), o, rng);
  const auto e = mc.covariance(0.5, 0.5, 0, 1);
  EXPECT_NEAR(e.value, limit_cov_g4(0.5, 0.5, 0, 1, 0.1), 3.0 * e.standard_error);
  // pooled block agrees with the per-point estimate
  Eigen::VectorXd grid(3);
  grid << 0.25, 0.5, 0.75;
  EXPECT_NEAR(mc.cross_block(grid, 0, 1)(1, 1), e.value, 1e-9);
  EXPECT_NEAR(mc.cross_block(grid, 1, 0)(0, 2), mc.covariance(0.75, 0.25, 0, 1).value, 1e-9);
}

TEST(NullQuantiles, BridgeSupNeverBelowGridMax) {
  NullSimulationOptions o;
  o.seed = 12;
  o.replicates = 2000;
  o.grid_size = 64;
  o.bridge_sup = false;
  const auto grid = simulate_null_quantiles(LimitCovarianceSpec::independent(2, {1}), o);
  o.bridge_sup = true;
  const auto bridge = simulate_null_quantiles(LimitCovarianceSpec::independent(2, {1}), o);
  for (std::size_t i = 0; i < grid.draws[0].size(); ++i) EXPECT_GE(bridge.draws[0][i], grid.draws[0][i]);
  // integral functionals do not depend on the sup refinement
  EXPECT_EQ(bridge.draws[2], grid.draws[2]);
  // coarse grid max is biased low; the refinement recovers the continuous sup
  const double target = std::sqrt(2.0) * 1.3581;
  EXPECT_LT(grid.quantile(0, 0.95), target);
  EXPECT_NEAR(bridge.quantile(0, 0.95), target, 0.04 * target);
}

TEST(NullQuantiles, SingleBridgeKolmogorovQuantile) {
  NullSimulationOptions o;
  o.seed = 11;
  o.replicates = 5000;
  const auto t = simulate_null_quantiles(LimitCovarianceSpec::independent(2, {1}), o);
  EXPECT_NEAR(t.quantile(0, 0.95), std::sqrt(2.0) * 1.3581, 0.03 * 1.9206);
  EXPECT_DOUBLE_EQ(t.quantile(0, 0.5), t.quantile(1, 0.5));
  for (std::size_t f = 0; f < 4; ++f) {
    EXPECT_LE(t.quantiles[f][0], t.quantiles[f][1]);
    EXPECT_LE(t.quantiles[f][1], t.quantiles[f][2]);
    for (double d : t.draws[f]) EXPECT_GE(d, 0.0);
  }
}

TEST(NullQuantiles, NormInequalityRealizationWise) {
  NullSimulationOptions o;
  o.seed = 12;
  o.replicates = 500;
  o.grid_size = 128;
  const auto t = simulate_null_quantiles(LimitCovarianceSpec::gaussian_four_nearest(0.0), o);
  for (std::size_t i = 0; i < t.draws[0].size(); ++i) {
    EXPECT_LE(t.draws[1][i], t.draws[0][i] + 1e-14);
    EXPECT_LE(t.draws[0][i], std::sqrt(2.0) * t.draws[1][i] + 1e-12);
  }
}

TEST(NullQuantiles, DeterministicAndThreadIndependent) {
  NullSimulationOptions o;
  o.seed = 5;
  o.replicates = 700;
  o.grid_size = 64;
  const auto spec = LimitCovarianceSpec::gaussian_four_nearest(0.2);
  const auto a = simulate_null_quantiles(spec, o);
  o.threads = 3;
  const auto b = simulate_null_quantiles(spec, o);
  for (std::size_t f = 0; f < 4; ++f) EXPECT_EQ(a.draws[f], b.draws[f]);
}

TEST(NullQuantiles, EndpointVarianceVanishes) {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(512, 1.0 / 513, 512.0 / 513);
  const auto c = limit_covariance_matrix(LimitCovarianceSpec::gaussian_four_nearest(0.24), grid);
  EXPECT_LT(c(0, 0), 0.004);
  EXPECT_LT(c(511, 511), 0.004);
  EXPECT_GT(c(255, 255), 0.49);
}

TEST(NullQuantiles, RejectsSmallGridOrReplicates) {
  NullSimulationOptions o;
  o.grid_size = 32;
  EXPECT_THROW(simulate_null_quantiles(LimitCovarianceSpec::gaussian_four_nearest(0.1), o), ConfigError);
  o.grid_size = 64;
  o.replicates = 50;
  EXPECT_THROW(simulate_null_quantiles(LimitCovarianceSpec::gaussian_four_nearest(0.1), o), ConfigError);
}

TEST(PValue, AddOneRule) {
  NullQuantileTable t;
  for (auto& d : t.draws) {
    for (int i = 1; i <= 99; ++i) d.push_back(i);
  }
  GofStatistics zero;
  for (double p : p_value(zero, t)) EXPECT_DOUBLE_EQ(p, 1.0);
  GofStatistics big{1000, 1000, 1000, 1000, 2};
  for (double p : p_value(big, t)) EXPECT_DOUBLE_EQ(p, 1.0 / 100.0);
  GofStatistics mid{50, 50, 50, 50, 2};
  for (double p : p_value(mid, t)) EXPECT_NEAR(p, 0.5, 0.011);
  double prev = 2.0;
  for (double x = 0; x < 101; x += 7) {
    const double p = p_value({x, x, x, x, 2}, t)[0];
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(Quantile, Type7) {
  std::vector<double> d;
  for (int i = 1; i <= 100; ++i) d.push_back(i);
  EXPECT_NEAR(quantile_type7(d, 0.025), 3.475, 1e-12);
  EXPECT_NEAR(quantile_type7(d, 0.975), 97.525, 1e-12);
  EXPECT_EQ(quantile_type7(d, 0.0), 1.0);
  EXPECT_EQ(quantile_type7(d, 1.0), 100.0);
}

TEST(Distances, Examples) {
  const std::vector<double> a{0.0}, b{1.0};
  EXPECT_DOUBLE_EQ(ks_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(cm_distance(a, b), 1.0);
  const std::vector<double> s{0.3, 1.2, -0.5, 2.2};
  EXPECT_EQ(ks_distance(s, s), 0.0);
  EXPECT_EQ(cm_distance(s, s), 0.0);
  // hand: F_a - F_b = 0.5 on [0, 1), 0 elsewhere
  const std::vector<double> c{0.0, 1.0}, e{1.0, 1.0};
  EXPECT_DOUBLE_EQ(ks_distance(c, e), 0.5);
  EXPECT_DOUBLE_EQ(cm_distance(c, e), 0.5);
}

TEST(Distances, ShrinkWithSampleSize) {
  RandomStream rng(9);
  auto draw = [&](int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.normal();
    return v;
  };
  const double small = ks_distance(draw(100), draw(100));
  const double large = ks_distance(draw(20000), draw(20000));
  EXPECT_LT(large, 3.0 * std::sqrt(2.0 / 20000.0));
  EXPECT_LT(large, small);
}
