#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "arelab/alt_model.hpp"
#include "arelab/errors.hpp"
#include "arelab/moments.hpp"
#include "arelab/power_engine.hpp"

using namespace arelab;

namespace {

// Oracle: substitute t = s^10 so the t^-r singularity becomes a smooth
// s^(9 - 10 r) factor, then plain adaptive Gauss-Kronrod on [0, 1].
template <class F>
double substituted(F h) {
  auto g = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double t = std::pow(s, 10.0);
    return t > 0.0 ? 10.0 * std::pow(s, 9.0) * h(t) : 0.0;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 12, 1e-12);
}

struct OracleMoments {
  double e0, var0, e1, var1;
};

OracleMoments oracle(double r, double theta) {
  auto lp = [=](double t) { return std::log((1 - theta) + theta * (1 - r) * std::pow(t, -r)); };
  auto p = [=](double t) { return (1 - theta) + theta * (1 - r) * std::pow(t, -r); };
  OracleMoments o{};
  o.e0 = substituted(lp);
  o.e1 = substituted([&](double t) { return p(t) * lp(t); });
  o.var0 = substituted([&](double t) { return std::pow(lp(t) - o.e0, 2); });
  o.var1 = substituted([&](double t) { return p(t) * std::pow(lp(t) - o.e1, 2); });
  return o;
}

}  // namespace

TEST(Moments, MatchSubstitutionOracle) {
  for (double r : {0.3, 0.4, 0.6, 0.7}) {
    for (double theta : {0.2, 0.1, 0.05, 0.02}) {
      const MomentSet m = log_moments(LocalAlternative(DensitySpec::power_tail(r), theta));
      const OracleMoments o = oracle(r, theta);
      EXPECT_NEAR(m.e0, o.e0, 1e-10) << r << ' ' << theta;
      EXPECT_NEAR(m.e1, o.e1, 1e-10) << r << ' ' << theta;
      EXPECT_NEAR(m.var0, o.var0, 1e-10) << r << ' ' << theta;
      EXPECT_NEAR(m.var1, o.var1, 1e-10) << r << ' ' << theta;
      EXPECT_LE(m.quadrature_error_estimate, 1e-10);
    }
  }
}

TEST(Moments, HighPrecisionReference) {
  // 50-digit mpmath quadrature.
  EXPECT_NEAR(log_moments(LocalAlternative(DensitySpec::power_tail(0.4), 0.1)).e0, -0.00224122913128936, 1e-12);
  EXPECT_NEAR(log_moments(LocalAlternative(DensitySpec::power_tail(0.7), 0.1)).e1, 0.0459022381454, 1e-12);
}

TEST(Moments, JensenOrdering) {
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double theta : {0.5, 0.1, 0.01, 0.001}) {
      const MomentSet m = log_moments(LocalAlternative(DensitySpec::power_tail(r), theta));
      EXPECT_LE(m.e0, 0.0);
      EXPECT_GE(m.e1 - m.e0, 0.0);
      EXPECT_GT(m.var0, 0.0);
      EXPECT_GT(m.var1, 0.0);
    }
  }
}

TEST(Moments, CustomDensityMatchesPowerTail) {
  const DensitySpec custom = DensitySpec::custom([](double t) { return 0.4 * std::pow(t, -0.6); });
  const MomentSet a = log_moments(LocalAlternative(custom, 0.05));
  const MomentSet b = log_moments(LocalAlternative(DensitySpec::power_tail(0.6), 0.05));
  EXPECT_NEAR(a.e0, b.e0, 1e-10);
  EXPECT_NEAR(a.e1, b.e1, 1e-10);
  EXPECT_NEAR(a.var0, b.var0, 1e-10);
  EXPECT_NEAR(a.var1, b.var1, 1e-10);
}

TEST(Moments, MonteCarloAgreement) {
  std::uint64_t seed = 101;
  for (double r : {0.3, 0.7}) {
    for (double theta : {0.2, 0.05}) {
      const LocalAlternative alt(DensitySpec::power_tail(r), theta);
      const MomentSet q = log_moments(alt);
      const MonteCarloMoments mc = monte_carlo_moments(alt, 1'000'000, seed++);
      EXPECT_NEAR(mc.e0, q.e0, 4 * mc.e0_se) << r << ' ' << theta;
      EXPECT_NEAR(mc.var0, q.var0, 4 * mc.var0_se) << r << ' ' << theta;
      EXPECT_NEAR(mc.e1, q.e1, 4 * mc.e1_se) << r << ' ' << theta;
      EXPECT_NEAR(mc.var1, q.var1, 4 * mc.var1_se) << r << ' ' << theta;
    }
  }
}

TEST(Moments, SquareIntegrableScaling) {
  // Normalized theta: (e1 - e0), var0, var1 are theta^2 (1 + o(1)).
  for (double r : {0.3, 0.4}) {
    double prev[3] = {1e9, 1e9, 1e9};
    for (double theta : {0.05, 0.02, 0.01, 0.005, 0.002, 0.001}) {
      const MomentSet m = log_moments(LocalAlternative::from_normalized(DensitySpec::power_tail(r), theta));
      const double ratio[3] = {(m.e1 - m.e0) / (theta * theta), m.var0 / (theta * theta), m.var1 / (theta * theta)};
      for (int i = 0; i < 3; ++i) {
        const double dist = std::fabs(std::log(ratio[i]));
        EXPECT_LT(dist, prev[i]) << "r=" << r << " theta=" << theta << " quantity " << i;
        prev[i] = dist;
        if (theta <= 0.005) {
          EXPECT_GE(ratio[i], 0.8) << r << ' ' << theta << ' ' << i;
          EXPECT_LE(ratio[i], 1.25) << r << ' ' << theta << ' ' << i;
        }
      }
    }
  }
}

TEST(Moments, HeavyTailScaling) {
  // (e1 - e0), var0, var1 are of order kappa^2.
  for (double r : {0.6, 0.7}) {
    double lo[3] = {1e9, 1e9, 1e9}, hi[3] = {0, 0, 0};
    for (double theta : {0.1, 0.05, 0.02}) {
      const MomentSet m = log_moments(LocalAlternative(DensitySpec::power_tail(r), theta));
      const double k2 = std::pow(kappa(r, theta), 2);
      const double ratio[3] = {(m.e1 - m.e0) / k2, m.var0 / k2, m.var1 / k2};
      for (int i = 0; i < 3; ++i) {
        EXPECT_GT(ratio[i], 0.25);
        EXPECT_LT(ratio[i], 10.0);
        lo[i] = std::min(lo[i], ratio[i]);
        hi[i] = std::max(hi[i], ratio[i]);
      }
    }
    for (int i = 0; i < 3; ++i) EXPECT_LT(hi[i] / lo[i], 1.5) << r << ' ' << i;
  }
}

TEST(Moments, IntegralIdentities) {
  for (double r : {0.4, 0.7}) {
    const LocalAlternative alt(DensitySpec::power_tail(r), 0.1);
    const MomentSet m = log_moments(alt);
    EXPECT_NEAR(integral_I(0, 1, alt), m.e0, 1e-12);
    EXPECT_NEAR(integral_I(1, 1, alt), m.e1 - m.e0, 1e-10);
    EXPECT_NEAR(integral_J(0, 2, alt, m.e0), m.var0, 1e-9);
    // J_12 is centred at e0, var1 at e1.
    EXPECT_NEAR(integral_J(1, 2, alt, m.e0), m.var1 + std::pow(m.e1 - m.e0, 2), 1e-9);
    const double j1 = integral_J(0, 1, alt, m.e0);
    EXPECT_GT(j1, 0.0);
    EXPECT_LE(j1 * j1, m.var0 * (1 + 1e-9));
  }
  const LocalAlternative alt(DensitySpec::power_tail(0.4), 0.1);
  EXPECT_THROW(integral_I(2, 1, alt), DomainError);
  EXPECT_THROW(integral_J(0, 0, alt, 0.0), DomainError);
}

TEST(Moments, ShiftB) {
  const MomentSet m = log_moments(LocalAlternative(DensitySpec::power_tail(0.4), 0.1));
  EXPECT_NEAR(shift_b(m, 100), 10.0 * (m.e1 - m.e0) / m.sigma0(), 1e-14);
  EXPECT_DOUBLE_EQ(m.sigma0(), std::sqrt(m.var0));
}
