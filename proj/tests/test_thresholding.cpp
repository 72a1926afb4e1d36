#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles/normal_oracle.hpp"
#include "percdet/model.hpp"
#include "percdet/random.hpp"
#include "percdet/thresholding.hpp"

using namespace percdet;

namespace {

// Brute-force Eq10 maximum over a 1e-5 grid, using the oracle CDF. The search
// runs on the excess over the saturated value so tiny sigma stays resolvable.
struct Eq10Oracle {
  double theta;
  double objective;
};

Eq10Oracle eq10_grid_oracle(double sigma, double pc) {
  const long double c = oracle::normal_quantile(1.0L - pc);
  const long double lo = sigma * c;
  const long double hi = 1.0L + sigma * c;
  Eq10Oracle best{0.0, -1.0};
  long double best_excess = -10.0L;
  for (long double t = lo + 1e-5L; t < hi; t += 1e-5L) {
    const long double u = oracle::normal_sf(t / sigma);
    const long double v = oracle::normal_cdf((t - 1.0L) / sigma);
    const long double excess = u * (u - 2.0L * pc) + v * (v - 2.0L * (1.0L - pc));
    if (excess > best_excess) {
      best_excess = excess;
      const long double a = u - pc;
      const long double b = (1.0L - v) - pc;
      best = {static_cast<double>(t), static_cast<double>(a * a + b * b)};
    }
  }
  return best;
}

ThresholdConfig default_config() { return ThresholdConfig{}; }

}  // namespace

TEST(ThetaFromAlpha0, Examples) {
  const NoiseModel m = NoiseModel::gaussian(1.0);
  EXPECT_NEAR(theta_from_alpha0(m, 0.5), 0.0, 1e-12);
  // Oracle: Phi^{-1}(1 - 0.02275) = 2.0000024439 (bisection on the series CDF).
  EXPECT_NEAR(theta_from_alpha0(m, 0.02275), 2.0000024439, 1e-6);
  EXPECT_NEAR(theta_from_alpha0(m, static_cast<double>(oracle::normal_sf(2.0L))), 2.0, 1e-6);
  for (double a : {0.1, 0.3, 0.7}) EXPECT_NEAR(p0_tail(m, theta_from_alpha0(m, a)), a, 1e-9);
  const NoiseModel scaled = NoiseModel::gaussian(0.3);
  for (double a : {0.1, 0.3, 0.7}) EXPECT_NEAR(p0_tail(scaled, theta_from_alpha0(scaled, a)), a, 1e-9);
}

TEST(ThetaFromAlpha0, Errors) {
  const NoiseModel m = NoiseModel::gaussian(1.0);
  EXPECT_THROW(theta_from_alpha0(m, 0.0), InvalidArgument);
  EXPECT_THROW(theta_from_alpha0(m, 1.0), InvalidArgument);
  const NoiseModel broken = NoiseModel::from_functions([](double) { return 0.0; });
  EXPECT_THROW(theta_from_alpha0(broken, 0.5), InfeasibleNoise);
}

TEST(ThetaFromAlpha0, SmallestThresholdMeetingLevel) {
  // Atoms at -1 and +1 with mass 1/2 each; P0(Y >= theta) <= 0.5 first holds at theta = -1.
  const NoiseModel m = NoiseModel::from_table({-1.0, -1.0, 1.0, 1.0}, {0.0, 0.5, 0.5, 1.0});
  EXPECT_EQ(theta_from_alpha0(m, 0.5), -1.0);
}

TEST(FeasibleInterval, GaussianMatchesQuantileOracle) {
  const ThresholdConfig cfg = default_config();
  const double c = static_cast<double>(oracle::normal_quantile(1.0L - cfg.p_c_site));
  const FeasibleInterval iv = feasible_interval(NoiseModel::gaussian(0.2), cfg);
  EXPECT_NEAR(iv.low, -0.0469, 1e-3);
  EXPECT_NEAR(iv.high, 0.9531, 1e-3);
  EXPECT_NEAR(iv.low, 0.2 * c, 1e-9);
  for (double sigma : {0.01, 0.05, 0.2, 1.0, 5.0})
    EXPECT_NEAR(feasible_interval(NoiseModel::gaussian(sigma), cfg).length(), 1.0, 1e-9);
}

TEST(FeasibleInterval, TwoPointLawWithCriticalMassIsInfeasible) {
  const ThresholdConfig cfg = default_config();
  const double q = 1.0 - cfg.p_c_site;
  const NoiseModel m = NoiseModel::from_table({-1.0, -1.0, 1.0, 1.0}, {0.0, q, q, 1.0});
  try {
    feasible_interval(m, cfg);
    FAIL() << "expected InfeasibleNoise";
  } catch (const InfeasibleNoise& e) {
    EXPECT_EQ(e.lower_edge(), 1.0);
    EXPECT_EQ(e.upper_edge(), 0.0);
  }
  EXPECT_THROW(select_theta_eq10(m, cfg), InfeasibleNoise);
  EXPECT_THROW(select_theta_eq11(m, cfg), InfeasibleNoise);
}

TEST(FeasibleInterval, TwoPointLawWithEqualMassIsFeasible) {
  const NoiseModel m = NoiseModel::from_table({-1.0, -1.0, 1.0, 1.0}, {0.0, 0.5, 0.5, 1.0});
  const FeasibleInterval iv = feasible_interval(m, default_config());
  EXPECT_EQ(iv.low, -1.0);
  EXPECT_EQ(iv.high, 0.0);
}

TEST(SelectEq10, Sigma02MatchesGridOracle) {
  const ThresholdConfig cfg = default_config();
  const ThresholdSelection s = select_theta_eq10(NoiseModel::gaussian(0.2), cfg);
  // Frozen oracle values: theta* = 0.51543711, objective = 0.5051114562.
  EXPECT_NEAR(s.theta, 0.51, 0.01);
  EXPECT_NEAR(s.objective_value, 0.505, 0.005);
  EXPECT_NEAR(s.theta, 0.51543711, 2e-5);
  EXPECT_NEAR(s.objective_value, 0.5051114562, 1e-9);
  EXPECT_LT(s.p_out, cfg.p_c_site);
  EXPECT_GT(s.p_im, cfg.p_c_site);
  EXPECT_EQ(s.alpha0, s.p_out);
  ASSERT_TRUE(s.feasible_interval);
  EXPECT_TRUE(s.feasible_interval->contains(s.theta));
}

TEST(SelectEq10, AgreesWithLiveGridOracle) {
  for (double sigma : {0.05, 0.1, 0.2, 0.35}) {
    const Eq10Oracle o = eq10_grid_oracle(sigma, kSitePercolationThreshold);
    const ThresholdSelection s = select_theta_eq10(NoiseModel::gaussian(sigma), default_config());
    EXPECT_NEAR(s.theta, o.theta, 2e-5) << sigma;
    EXPECT_GE(s.objective_value, o.objective - 1e-9) << sigma;
  }
}

TEST(SelectEq10, TinySigmaPushesProbabilitiesToExtremes) {
  const ThresholdSelection s = select_theta_eq10(NoiseModel::gaussian(0.05), default_config());
  EXPECT_GE(s.theta, 0.45);
  EXPECT_LE(s.theta, 0.55);
  // Frozen oracle value: theta* = 0.50093832.
  EXPECT_NEAR(s.theta, 0.50093832, 2e-5);
  EXPECT_NEAR(s.theta, eq10_grid_oracle(0.05, kSitePercolationThreshold).theta, 2e-5);
  EXPECT_LT(s.p_out, 1e-9);
  EXPECT_GT(s.p_im, 1.0 - 1e-9);
}

TEST(SelectEq10, BeatsRandomFeasibleProbes) {
  const ThresholdConfig cfg = default_config();
  for (double sigma : {0.1, 0.2, 0.5}) {
    const NoiseModel m = NoiseModel::gaussian(sigma);
    const ThresholdSelection s = select_theta_eq10(m, cfg);
    const FeasibleInterval iv = *s.feasible_interval;
    const CounterStream probes(77);
    for (int k = 0; k < 1000; ++k) {
      const double t = iv.low + probes.open_uniform(k) * iv.length();
      EXPECT_GE(s.objective_value, eq10_objective(m, t, cfg.p_c_site) - 1e-12);
    }
  }
}

TEST(SelectEq11, MidpointOfFeasibleInterval) {
  const ThresholdSelection s = select_theta_eq11(NoiseModel::gaussian(0.2), default_config());
  EXPECT_NEAR(s.theta, 0.4531, 1e-3);
  EXPECT_NEAR(s.theta, 0.453077111781, 1e-9);
  EXPECT_EQ(s.objective_value, 2.0);
  EXPECT_EQ(eq11_objective(NoiseModel::gaussian(0.2), s.theta, kSitePercolationThreshold), 2.0);
  EXPECT_NEAR(select_theta_eq11(NoiseModel::gaussian(1e-6), default_config()).theta, 0.5, 1e-5);
}

TEST(SelectTheta, SelectorsSatisfyPercolationConstraints) {
  const ThresholdConfig cfg = default_config();
  for (double sigma : {0.05, 0.2, 0.6, 1.5}) {
    const NoiseModel m = NoiseModel::gaussian(sigma);
    for (const ThresholdSelection& s : {select_theta_eq10(m, cfg), select_theta_eq11(m, cfg)}) {
      EXPECT_LT(p0_tail(m, s.theta), cfg.p_c_site) << sigma;
      EXPECT_LT(cfg.p_c_site, 1.0 - p1_cdf(m, s.theta)) << sigma;
      EXPECT_LT(s.feasible_interval->low, s.theta);
      EXPECT_LT(s.theta, s.feasible_interval->high);
    }
  }
}

TEST(SelectTheta, ManualRuleKeepsThetaEvenIfInfeasible) {
  ThresholdConfig cfg;
  cfg.rule = ThresholdRule::Manual;
  cfg.manual_theta = 0.3;
  const ThresholdSelection s = select_theta(NoiseModel::gaussian(0.2), cfg);
  EXPECT_EQ(s.theta, 0.3);
  EXPECT_EQ(s.rule, ThresholdRule::Manual);
  const double q = 1.0 - cfg.p_c_site;
  const NoiseModel bad = NoiseModel::from_table({-1.0, -1.0, 1.0, 1.0}, {0.0, q, q, 1.0});
  const ThresholdSelection t = select_theta(bad, cfg);
  EXPECT_FALSE(t.feasible_interval);
  cfg.manual_theta.reset();
  EXPECT_THROW(select_theta(NoiseModel::gaussian(0.2), cfg), InvalidArgument);
}

TEST(ThresholdConfig, Validation) {
  ThresholdConfig cfg;
  cfg.p_c_site = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.grid_resolution = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(ApplyThreshold, TieIsBlack) {
  const GrayImage img = GrayImage::filled(4, 3, 0.7);
  const BinaryImage at = apply_threshold(img, 0.7);
  const BinaryImage above = apply_threshold(img, 0.7 + 1e-12);
  for (std::uint8_t b : at.values()) EXPECT_EQ(b, 1);
  for (std::uint8_t b : above.values()) EXPECT_EQ(b, 0);
}

TEST(ApplyThreshold, PlusShape) {
  const GrayImage img(3, 3, {0, 1, 0, 1, 1, 1, 0, 1, 0});
  const BinaryImage bits = apply_threshold(img, 0.5);
  EXPECT_EQ(bits, BinaryImage(3, 3, {0, 1, 0, 1, 1, 1, 0, 1, 0}));
  EXPECT_THROW(apply_threshold(img, std::nan("")), InvalidArgument);
}

TEST(ApplyThreshold, BlackSetShrinksAsThetaRises) {
  const GrayImage img = synthesize(centered_square(40, 40, 12), NoiseModel::gaussian(0.5), 3);
  const CounterStream s(8);
  for (int k = 0; k < 50; ++k) {
    double t1 = -1.0 + 3.0 * s.uniform(2 * k);
    double t2 = -1.0 + 3.0 * s.uniform(2 * k + 1);
    if (t1 > t2) std::swap(t1, t2);
    const BinaryImage low = apply_threshold(img, t1);
    const BinaryImage high = apply_threshold(img, t2);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_LE(high[i], low[i]);
  }
}

TEST(ApplyThreshold, BinaryImageIsFixedPoint) {
  const GrayImage src = synthesize(centered_square(25, 25, 9), NoiseModel::gaussian(0.4), 21);
  const BinaryImage bits = apply_threshold(src, 0.5);
  for (double theta : {1e-9, 0.25, 0.5, 0.999, 1.0}) EXPECT_EQ(apply_threshold(to_gray(bits), theta), bits);
}
