#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "mrfgof/errors.hpp"
#include "mrfgof/estimation.hpp"
#include "mrfgof/gibbs.hpp"
#include "mrfgof/kolmogorov.hpp"
#include "mrfgof/normal.hpp"
#include "mrfgof/residuals.hpp"

using namespace mrfgof;

namespace {

MrfModel gaussian(double alpha, double eta, double tau2) {
  return {GaussianMrf{alpha, eta, tau2}, NeighborhoodTemplate::nearest(2)};
}

// kappa chosen so that p(s) = 0.3 with no neighbors present.
MrfModel binary_p03() { return {AutologisticMrf{std::log(0.3 / 0.7), 0.5}, NeighborhoodTemplate::nearest(2)}; }

}  // namespace

TEST(ConditionalMean, Examples) {
  const std::vector<double> ones{1, 1, 1, 1};
  EXPECT_NEAR(conditional_mean_gaussian({0.0, 0.1, 1.0}, ones), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(conditional_mean_gaussian({3.5, 0.0, 1.0}, ones), 3.5);
  EXPECT_DOUBLE_EQ(conditional_mean_gaussian({2.0, 0.2, 1.0}, std::vector<double>{3, 1}), 2.0);
}

TEST(ConditionalCdf, GaussianExamples) {
  EXPECT_DOUBLE_EQ(conditional_cdf(gaussian(0, 0, 1), 0.0, {}), 0.5);
  const std::vector<double> ones{1, 1, 1, 1};
  EXPECT_NEAR(conditional_cdf(gaussian(0, 0.1, 1), 0.4, ones), 0.5, 1e-15);
  EXPECT_NEAR(conditional_cdf(gaussian(1, 0, 4), 3.0, {}), normal_cdf(1.0), 1e-15);
}

TEST(ConditionalCdf, BinaryExamples) {
  const auto m = binary_p03();
  EXPECT_NEAR(conditional_cdf(m, 0.0, {}), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(conditional_cdf(m, 1.0, {}), 1.0);
  EXPECT_NEAR(conditional_cdf_left(m, 1.0, {}), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(conditional_cdf_left(m, 0.0, {}), 0.0);
}

TEST(ConditionalCdf, LeftLimitBelowAndMonotone) {
  const std::vector<double> nb{1, 0, 1};
  for (const auto& m : {gaussian(0.3, 0.2, 0.7), binary_p03()}) {
    double prev = -1.0;
    for (double y = -3.0; y <= 3.0; y += 0.25) {
      const double f = conditional_cdf(m, y, nb), fl = conditional_cdf_left(m, y, nb);
      EXPECT_LE(fl, f);
      if (m.is_continuous()) EXPECT_DOUBLE_EQ(fl, f);
      EXPECT_GE(f, prev);
      prev = f;
    }
  }
}

TEST(ConditionalSample, IidMeanAndDeterminism) {
  const auto m = gaussian(1.5, 0.0, 2.0);
  RandomStream a(42), b(42);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = conditional_sample(m, {}, a);
    EXPECT_EQ(x, conditional_sample(m, {}, b));
    sum += x;
  }
  EXPECT_NEAR(sum / n, 1.5, 4.0 * std::sqrt(2.0 / n));
}

TEST(ConditionalSample, DegenerateBinary) {
  const MrfModel m{AutologisticMrf{800.0, 0.0}, NeighborhoodTemplate::nearest(2)};
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(conditional_sample(m, {}, rng), 1.0);
}

TEST(Model, Validation) {
  EXPECT_THROW(gaussian(0, 0.1, 0.0).validate(), ConfigError);
  EXPECT_THROW(gaussian(NAN, 0.1, 1.0).validate(), ConfigError);
  EXPECT_NO_THROW(gaussian(0, 0.1, 1.0).validate());
  EXPECT_EQ(parse_edge_rule("interior_only"), EdgeRule::interior_only);
  EXPECT_THROW(parse_edge_rule("nope"), ConfigError);
}

TEST(Gibbs, IndependentCaseIsIidNormal) {
  const auto m = gaussian(0.5, 0.0, 2.0);
  const auto w = SamplingWindow::grid(20, 25);
  RandomStream rng(3);
  const auto fields = gibbs_simulate(m, w, build_cover(m.neighborhood), {50, 1, 20, SweepOrder::conclique}, rng);
  std::vector<double> z;
  double ss = 0.0;
  for (const auto& f : fields) {
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
      const double x = f.values[i];
      z.push_back(normal_cdf((x - 0.5) / std::sqrt(2.0)));
      ss += (x - 0.5) * (x - 0.5);
    }
  }
  ASSERT_EQ(z.size(), 10000u);
  EXPECT_NEAR(ss / 10000.0, 2.0, 0.04 * 2.0 * 1.5);
  EXPECT_GT(kolmogorov_pvalue(ks_uniform_distance(z), z.size()), 0.01);
}

TEST(Gibbs, MarginalVarianceMatchesDenseCovariance) {
  const double eta = 0.24;
  const auto m = gaussian(0.0, eta, 1.0);
  const auto w = SamplingWindow::grid(30, 30);
  // oracle: diag of (I - eta H)^-1 from a dense H built by hand
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(900, 900);
  for (int r = 0; r < 30; ++r) {
    for (int c = 0; c < 30; ++c) {
      if (r + 1 < 30) h(r * 30 + c, (r + 1) * 30 + c) = h((r + 1) * 30 + c, r * 30 + c) = 1;
      if (c + 1 < 30) h(r * 30 + c, r * 30 + c + 1) = h(r * 30 + c + 1, r * 30 + c) = 1;
    }
  }
  const Eigen::MatrixXd sigma = (Eigen::MatrixXd::Identity(900, 900) - eta * h).inverse();
  RandomStream rng(5);
  const auto fields = gibbs_simulate(m, w, build_cover(m.neighborhood), {500, 10, 1000, SweepOrder::conclique}, rng);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(900);
  for (const auto& f : fields) var += f.values.array().square().matrix();
  var /= static_cast<double>(fields.size());
  EXPECT_GT(sigma.diagonal().minCoeff(), 1.0);
  EXPECT_NEAR(var.mean(), sigma.diagonal().mean(), 0.03 * sigma.diagonal().mean());
  const int center = 15 * 30 + 15, corner = 0;
  EXPECT_NEAR(var[center], sigma(center, center), 0.12 * sigma(center, center));
  EXPECT_NEAR(var[corner], sigma(corner, corner), 0.12 * sigma(corner, corner));
  EXPECT_GT(var.mean(), 1.0);
}

TEST(Gibbs, SameSeedSameFields) {
  const auto m = gaussian(0.0, 0.2, 1.0);
  const auto w = SamplingWindow::grid(8, 9);
  const auto cover = build_cover(m.neighborhood);
  RandomStream a(9), b(9);
  const auto fa = gibbs_simulate(m, w, cover, {20, 2, 3, SweepOrder::conclique}, a);
  const auto fb = gibbs_simulate(m, w, cover, {20, 2, 3, SweepOrder::conclique}, b);
  for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(fa[i].values, fb[i].values);
}

TEST(Gibbs, RasterAndConcliqueOrdersAgree) {
  const auto m = gaussian(1.0, 0.2, 1.0);
  const auto w = SamplingWindow::grid(10, 10);
  const auto cover = build_cover(m.neighborhood);
  const int n = 2000;
  auto moments = [&](SweepOrder order, std::uint64_t seed) {
    RandomStream rng(seed);
    const auto fields = gibbs_simulate(m, w, cover, {200, 10, n, order}, rng);
    Eigen::MatrixXd x(n, 100);
    for (int i = 0; i < n; ++i) x.row(i) = fields[static_cast<std::size_t>(i)].values.transpose();
    return x;
  };
  const Eigen::MatrixXd a = moments(SweepOrder::conclique, 1), b = moments(SweepOrder::raster, 2);
  const double crit = 3.9;  // two-sided 1% with a Bonferroni split over 200 tests
  for (int s = 0; s < 100; ++s) {
    const double ma = a.col(s).mean(), mb = b.col(s).mean();
    const double va = (a.col(s).array() - ma).square().sum() / (n - 1);
    const double vb = (b.col(s).array() - mb).square().sum() / (n - 1);
    EXPECT_LT(std::fabs(ma - mb) / std::sqrt(va / n + vb / n), crit) << "site " << s;
    // log variance ratio has SE about sqrt(2/(n-1)) per sample
    EXPECT_LT(std::fabs(std::log(va / vb)) / std::sqrt(4.0 / (n - 1)), crit) << "site " << s;
  }
}

TEST(Gibbs, RejectsBadOptionsAndAsymmetricTemplate) {
  const auto w = SamplingWindow::grid(5, 5);
  const auto m = gaussian(0, 0.1, 1);
  RandomStream rng(1);
  EXPECT_THROW(gibbs_simulate(m, w, build_cover(m.neighborhood), {10, 0, 1, SweepOrder::conclique}, rng),
               ConfigError);
  const MrfModel uni{GaussianMrf{0, 0.1, 1}, NeighborhoodTemplate::unilateral()};
  EXPECT_THROW(gibbs_simulate(uni, w, build_cover(uni.neighborhood), {}, rng), ConfigError);
  EXPECT_THROW(gibbs_simulate(m, w, build_cover(NeighborhoodTemplate::chebyshev(2)), {}, rng), ConfigError);
}
