#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "arelab/errors.hpp"
#include "arelab/ks_null.hpp"

using namespace arelab;

namespace {

struct Reference {
  std::size_t n;
  double d;
  double sf;
};

// scipy.stats.kstwo.sf(d, n) for n <= 200; the n = 1000 values come from the
// Durbin matrix evaluated in 40-digit mpmath (scipy approximates there).
constexpr Reference kScipy[] = {
    {5, 0.3, 0.664},
    {10, 0.2, 0.74871903999999990},
    {20, 0.35, 0.010754963444389310},
    {100, 0.136, 0.044860299790847456},
    {100, 0.05, 0.95321597106357250},
    {1000, 0.043, 0.048110977242312460},
    {1000, 0.02, 0.81089713107021213},
    {200, 0.15, 0.00021541912448873080},
    {50, 0.4, 9.86356336441006e-08},
};

double sf(std::size_t n, double u) { return ks_sf(n, u, KsMethod::exact).survival; }

}  // namespace

TEST(KsNull, SingleObservationClosedForm) {
  for (double u = 0.5; u <= 1.0; u += 0.01) EXPECT_NEAR(sf(1, u), std::min(1.0, 2.0 * (1.0 - u)), 1e-12) << u;
  EXPECT_EQ(sf(1, 0.3), 1.0);
  EXPECT_EQ(sf(1, 1.2), 0.0);
}

TEST(KsNull, MatchesScipy) {
  for (const Reference& ref : kScipy) {
    const KsTail t = ks_sf(ref.n, std::sqrt(double(ref.n)) * ref.d, KsMethod::exact);
    EXPECT_NEAR(t.survival / ref.sf, 1.0, ref.sf < 1e-6 ? 1e-5 : 1e-9) << ref.n << ' ' << ref.d;
    EXPECT_NEAR(t.log_survival, std::log(ref.sf), ref.sf < 1e-6 ? 1e-5 : 1e-9);
  }
}

TEST(KsNull, AsymptoticReference) {
  EXPECT_NEAR(ks_sf_asymptotic(1.36), 0.049485876755377876, 1e-14);
  EXPECT_NEAR(ks_critical_asymptotic(0.05), 1.3580986393225507, 1e-9);
  for (double lambda : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    EXPECT_NEAR(ks_log_sf_asymptotic(lambda), std::log(ks_sf_asymptotic(lambda)), 1e-12) << lambda;
  }
  EXPECT_NEAR(ks_log_sf_asymptotic(30.0), std::log(2.0) - 2.0 * 900.0, 1e-9);
}

TEST(KsNull, NonincreasingInU) {
  for (std::size_t n : {3u, 40u, 700u}) {
    double prev = 1.0;
    for (double u = 0.01; u < 3.0; u += 0.01) {
      const double s = sf(n, u);
      EXPECT_LE(s, prev + 1e-15) << n << ' ' << u;
      prev = s;
    }
  }
}

TEST(KsNull, ConvergesToAsymptotic) {
  for (std::size_t n : {100u, 1000u, 10000u}) {
    for (double lambda : {0.5, 0.8, 1.0, 1.36, 1.7, 2.0}) {
      const double diff = std::fabs(sf(n, lambda) - ks_sf_asymptotic(lambda));
      EXPECT_LE(diff * std::sqrt(double(n)), 0.5) << n << ' ' << lambda;
    }
  }
}

TEST(KsNull, DeepTailContinuity) {
  // The log-space tail path takes over below 1e-7; both sides must meet.
  const std::size_t n = 400;
  double prev = 0.0;
  for (double u = 2.4; u < 4.0; u += 0.01) {
    const double l = ks_sf(n, u, KsMethod::exact).log_survival;
    if (u > 2.4) {
      EXPECT_LT(l, prev);
      EXPECT_GT(l, prev - 0.2);
    }
    prev = l;
  }
  const double d = 3.0 / 20.0;
  EXPECT_NEAR(ks_log_sf_tail(n, d), std::log1p(-ks_cdf_exact(n, d)), 1e-6);
  EXPECT_LT(ks_sf(n, 12.0, KsMethod::exact).log_survival, -250.0);
}

TEST(KsNull, MonteCarloAgreement) {
  KsMonteCarloOptions mc;
  mc.replicates = 200000;
  const KsTail m = ks_sf(100, 1.36, KsMethod::monte_carlo, mc);
  EXPECT_EQ(m.replicates, 200000u);
  EXPECT_NEAR(m.survival, sf(100, 1.36), 3 * m.standard_error);
}

TEST(KsNull, CriticalRoundTrip) {
  for (std::size_t n : {1u, 7u, 100u, 1000u}) {
    for (double alpha : {0.2, 0.05, 0.01, 1e-4}) {
      const double u = ks_critical(n, alpha);
      EXPECT_LE(sf(n, u), alpha) << n << ' ' << alpha;
      EXPECT_GT(sf(n, u - 1e-6), alpha) << n << ' ' << alpha;
    }
  }
  EXPECT_NEAR(ks_critical(1, 0.05), 0.975, 1e-9);
  EXPECT_NEAR(ks_critical(1000, 0.05) / ks_critical_asymptotic(0.05), 1.0, 0.005);
}

TEST(KsNull, ModerateDeviationRate) {
  double prev_gap = 1.0;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const double rate = moddev_rate_ks(n, std::pow(double(n), -0.25));
    EXPECT_GE(rate, 1.9);
    EXPECT_LE(rate, 2.1);
    EXPECT_LT(std::fabs(rate - 2.0), prev_gap);
    prev_gap = std::fabs(rate - 2.0);
  }
}

TEST(KsNull, Errors) {
  EXPECT_THROW(ks_sf(0, 1.0, KsMethod::exact), DomainError);
  EXPECT_THROW(ks_critical(10, 0.0), DomainError);
  EXPECT_THROW(ks_critical(10, 1.5), DomainError);
  EXPECT_THROW(ks_sf(1'000'000, 1.36, KsMethod::exact), CapabilityError);
  EXPECT_THROW(moddev_rate_ks(100, 0.0), DomainError);
}
