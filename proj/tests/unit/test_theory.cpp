#include <gtest/gtest.h>

#include <cmath>

#include "arelab/errors.hpp"
#include "arelab/ks_null.hpp"
#include "arelab/theory.hpp"

using namespace arelab;

TEST(Efficiency, ClosedFormMatchesQuadrature) {
  for (int i = 1; i <= 9; ++i) {
    const double r = 0.05 * i;
    const double closed = efficiency_power_family(r);
    EXPECT_NEAR(efficiency_theoretical(normalize_score(DensitySpec::power_tail(r))), closed, 1e-6 * closed) << r;
    EXPECT_NEAR(closed, std::pow(1 - r, 2 - 2 / r) / (4 * (1 - 2 * r)), 1e-12 * closed);
  }
  EXPECT_NEAR(efficiency_power_family(0.4), 5.787, 1e-3);
  EXPECT_NEAR(efficiency_power_family(0.3), 3.302, 1e-3);
}

TEST(Efficiency, CustomDensityRoute) {
  const DensitySpec custom = DensitySpec::custom([](double t) { return 0.65 * std::pow(t, -0.35); });
  EXPECT_NEAR(efficiency_theoretical(normalize_score(custom)), efficiency_power_family(0.35), 1e-6);
}

TEST(Efficiency, IncreasesAndDiverges) {
  double prev = 0.0;
  for (double r = 0.26; r < 0.5; r += 0.01) {
    const double e = efficiency_power_family(r);
    EXPECT_GT(e, prev) << r;
    prev = e;
  }
  EXPECT_GT(efficiency_power_family(0.49), 50.0);
  EXPECT_THROW(efficiency_power_family(0.5), DomainError);
  EXPECT_THROW(efficiency_power_family(0.7), DomainError);
  EXPECT_THROW(efficiency_power_family(0.0), DomainError);
}

TEST(Slopes, IdentityWithEfficiency) {
  for (double r : {0.1, 0.3, 0.45}) {
    const NormalizedScore a = normalize_score(DensitySpec::power_tail(r));
    for (std::size_t n : {10u, 1000u, 123457u}) {
      const SlopePair s = slopes(n, 0.03, a);
      EXPECT_NEAR(s.np_slope, n * 0.03 * 0.03 / 2, 1e-12 * s.np_slope);
      EXPECT_NEAR(s.ks_slope * efficiency_theoretical(a), s.np_slope, 1e-12 * s.np_slope);
    }
  }
}

TEST(Slopes, KsSlopeTracksExactTail) {
  // Exact KS tail at the mean shift sqrt(n) theta ||A|| against 2 n theta^2 ||A||^2.
  const NormalizedScore a = normalize_score(DensitySpec::power_tail(0.3));
  const std::size_t n = 10000;
  const double theta = 0.05;
  const SlopePair s = slopes(n, theta, a);
  const double u = std::sqrt(double(n)) * theta * sup_norm_A(a);
  const double neg_log = -ks_sf(n, u, KsMethod::exact).log_survival;
  EXPECT_NEAR(neg_log / s.ks_slope, 1.0, 0.3);
}

TEST(Slopes, NpSlopeTracksShiftLevel) {
  const DensitySpec spec = DensitySpec::power_tail(0.4);
  const NormalizedScore a = normalize_score(spec);
  SimulationConfig cfg;
  const TailEstimate t = np_level_from_shift(LocalAlternative::from_normalized(spec, 0.05), 10000, 0.0, cfg);
  EXPECT_NEAR(-t.log_probability / slopes(10000, 0.05, a).np_slope, 1.0, 0.3);
}

TEST(Slopes, ShiftLevelNearNpSlope) {
  // At finite n the Gaussian tail carries a Mills-ratio factor, which pushes
  // -log alpha above n theta^2 / 2 by about a third here.
  const DensitySpec spec = DensitySpec::power_tail(0.3);
  SimulationConfig cfg;
  const std::size_t n = 4000;
  const double theta = 0.05;
  const TailEstimate t = np_level_from_shift(LocalAlternative::from_normalized(spec, theta), n, 0.0, cfg);
  const double ratio = -std::log(t.probability) / (n * theta * theta / 2);
  EXPECT_GE(ratio, 0.7);
  EXPECT_LE(ratio, 1.5);
}

TEST(Bernstein, BoundFormula) {
  EXPECT_DOUBLE_EQ(bernstein_bound(0.1, 1.0, 100), 1.0);
  const double x = 4.0, M = 2.0;
  EXPECT_NEAR(bernstein_bound(x, M, 400), 2 * std::exp(-x * x / (2 * (1 + x * M / 20.0))), 1e-15);
  const MomentSet m = log_moments(LocalAlternative(DensitySpec::power_tail(0.3), 0.1));
  EXPECT_NEAR(bernstein_scale(0.3, m), 1.8 / m.sigma0(), 1e-12);
}

TEST(Bernstein, DominatesSimulatedTail) {
  const LocalAlternative alt(DensitySpec::power_tail(0.3), 0.1);
  const MomentSet m = log_moments(alt);
  SimulationConfig cfg;
  cfg.replicates = 1'000'000;
  const std::size_t n = 200;
  const double M = bernstein_scale(0.3, m);
  for (double x : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    const TailEstimate t = np_null_tail(alt, m, n, x, cfg);
    EXPECT_LE(t.probability, bernstein_bound(x, M, n) + 3 * t.standard_error) << x;
  }
}

TEST(ModerateDeviation, SquareIntegrableWindow) {
  const LocalAlternative alt = LocalAlternative::from_normalized(DensitySpec::power_tail(0.3), 0.05);
  SimulationConfig cfg;
  const double sigma0 = log_moments(alt).sigma0();
  EXPECT_THROW(np_moddev_rate(alt, 1000, 0.1 * sigma0, cfg), DomainError);
  EXPECT_THROW(np_moddev_rate(alt, 1000, 1.9 * sigma0, cfg), DomainError);
  const ModerateDeviationRate md = np_moddev_rate_detail(alt, 8000, sigma0, cfg);
  EXPECT_TRUE(md.tail.importance_sampled);
  EXPECT_GE(md.rate, 0.35);
  EXPECT_LE(md.rate, 0.65);
  EXPECT_DOUBLE_EQ(md.sigma0, sigma0);
}

TEST(ModerateDeviation, HeavyTailRatePositive) {
  const LocalAlternative alt(DensitySpec::power_tail(0.7), 0.05);
  SimulationConfig cfg;
  EXPECT_GE(np_moddev_rate(alt, 2000, 0.05, cfg), 0.05);
}
