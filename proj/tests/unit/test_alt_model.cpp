#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "arelab/alt_model.hpp"
#include "arelab/errors.hpp"

using namespace arelab;

namespace {

// Same power-tail density, but routed through the generic evaluator path.
DensitySpec power_as_custom(double r, bool with_cdf) {
  auto f = [r](double t) { return (1.0 - r) * std::pow(t, -r); };
  if (!with_cdf) return DensitySpec::custom(f, {}, "power-custom");
  return DensitySpec::custom(f, [r](double t) { return std::pow(t, 1.0 - r); }, "power-custom");
}

std::vector<DensitySpec> families() {
  return {DensitySpec::power_tail(0.3), DensitySpec::power_tail(0.4), DensitySpec::power_tail(0.6),
          DensitySpec::power_tail(0.7), power_as_custom(0.3, false), power_as_custom(0.7, true),
          DensitySpec::custom([](double t) { return 2.0 * (1.0 - t); }, {}, "triangle")};
}

double oracle_integral(const std::function<double(double)>& h) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(h, 0.0, 1.0, 1e-13);
}

double kolmogorov_sf(double lambda) {
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return s;
}

}  // namespace

TEST(AltModel, CdfOfQuantileIsIdentity) {
  for (const DensitySpec& spec : families()) {
    for (double theta : {0.02, 0.05, 0.1, 0.2}) {
      for (int i = 0; i <= 400; ++i) {
        const double u = i == 0 ? 0.0 : std::pow(10.0, -12.0 + 12.0 * i / 400.0);
        ASSERT_NEAR(cdf_value(spec, theta, quantile(spec, theta, u)), u, 1e-10)
            << spec.name() << " theta=" << theta << " u=" << u;
        ASSERT_NEAR(cdf_value(spec, theta, quantile(spec, theta, 1.0 - u)), 1.0 - u, 1e-10);
      }
    }
  }
}

TEST(AltModel, PowerTailCdfClosedForm) {
  for (double r : {0.3, 0.7}) {
    for (double theta : {0.05, 0.2}) {
      for (double t : {1e-9, 0.001, 0.3, 0.9}) {
        EXPECT_NEAR(cdf_value(DensitySpec::power_tail(r), theta, t),
                    (1 - theta) * t + theta * std::pow(t, 1 - r), 1e-15);
      }
    }
  }
}

TEST(AltModel, DensityIntegratesToOne) {
  for (const DensitySpec& spec : families()) {
    for (double theta : {0.02, 0.1, 0.5}) {
      const double v = oracle_integral([&](double t) { return density_value(spec, theta, t); });
      EXPECT_NEAR(v, 1.0, 1e-8) << spec.name();
    }
  }
}

TEST(AltModel, LogDensityMatchesLogOfDensity) {
  const DensitySpec spec = DensitySpec::power_tail(0.6);
  for (double theta : {0.01, 0.3}) {
    for (double t : {1e-30, 1e-6, 0.01, 0.5, 1.0}) {
      EXPECT_NEAR(log_density(spec, theta, t), std::log(density_value(spec, theta, t)), 1e-13);
    }
  }
}

TEST(AltModel, NormalizedScoreHasUnitNorm) {
  for (double r : {0.1, 0.3, 0.45}) {
    for (bool custom : {false, true}) {
      const NormalizedScore a = normalize_score(custom ? power_as_custom(r, false) : DensitySpec::power_tail(r));
      EXPECT_NEAR(oracle_integral([&](double t) { return a.a(t); }), 0.0, 1e-8);
      EXPECT_NEAR(oracle_integral([&](double t) { return a.a(t) * a.a(t); }), 1.0, 1e-8);
      EXPECT_NEAR(a.c(), r / std::sqrt(1 - 2 * r), 1e-8);
    }
  }
  EXPECT_THROW(normalize_score(DensitySpec::power_tail(0.5)), DomainError);
  EXPECT_THROW(normalize_score(DensitySpec::power_tail(0.7)), DomainError);
}

TEST(AltModel, PrimitiveClosedForm) {
  const DensitySpec spec = DensitySpec::power_tail(0.4);
  const NormalizedScore a = normalize_score(spec);
  for (double t : {0.0, 1e-8, 0.2, 0.7, 1.0}) {
    EXPECT_NEAR(primitive_A(spec, t), std::pow(t, 0.6) - t, 1e-14);
    EXPECT_NEAR(primitive_A(a, t), (std::pow(t, 0.6) - t) / a.c(), 1e-13);
  }
}

TEST(AltModel, SupNormClosedFormMatchesGrid) {
  for (int i = 1; i <= 9; ++i) {
    const double r = 0.05 * i;
    const NormalizedScore closed = normalize_score(DensitySpec::power_tail(r));
    const NormalizedScore generic = normalize_score(power_as_custom(r, true));
    double scan = 0.0;
    for (int i = 1; i < 200000; ++i) scan = std::max(scan, std::fabs(primitive_A(closed, i / 200000.0)));
    EXPECT_NEAR(sup_norm_A(closed), scan, 1e-6) << r;
    EXPECT_NEAR(sup_norm_A(generic), sup_norm_A(closed), 1e-6) << r;
    EXPECT_NEAR(sup_norm_A_detail(closed).argmax, std::pow(1 - r, 1 / r), 1e-12);
  }
}

TEST(AltModel, KappaOrdering) {
  for (double r : {0.5, 0.6, 0.75, 0.9, 0.99}) {
    for (double theta : {1e-6, 1e-3, 0.02, 0.05, 0.1}) {
      const double k = kappa(r, theta);
      EXPECT_GT(k, theta) << r << ' ' << theta;
      EXPECT_LT(k, 1.1 * std::sqrt(theta)) << r << ' ' << theta;
    }
  }
  EXPECT_NEAR(kappa(0.7, 0.01), std::pow(0.01, 1 / 1.4), 1e-15);
  EXPECT_NEAR(kappa(0.5, 0.01), 0.01 * std::sqrt(std::log(100.0)), 1e-15);
}

TEST(AltModel, SamplerPassesKsAgainstCdf) {
  for (const DensitySpec& spec : {DensitySpec::power_tail(0.7), power_as_custom(0.4, false)}) {
    const double theta = 0.3;
    std::vector<double> x = sample_alternative(spec, theta, 100000, rng::Stream(2024, rng::Op::sampler, 1, 0));
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double F = cdf_value(spec, theta, x[i]);
      d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    EXPECT_GT(kolmogorov_sf(std::sqrt(n) * d), 1e-3) << spec.name();
  }
}

TEST(AltModel, SamplerDeterministic) {
  const LocalAlternative alt(DensitySpec::power_tail(0.6), 0.05);
  const rng::Stream s(1, rng::Op::sampler, 0, 9);
  EXPECT_EQ(sample_alternative(alt, 257, s), sample_alternative(alt, 257, s));
}

TEST(AltModel, LocalAlternativeDomain) {
  const DensitySpec spec = DensitySpec::power_tail(0.4);
  EXPECT_THROW(LocalAlternative(spec, 0.0), DomainError);
  EXPECT_THROW(LocalAlternative(spec, 1.0), DomainError);
  EXPECT_THROW(LocalAlternative(spec, -0.1), DomainError);
  EXPECT_NO_THROW(LocalAlternative(spec, 0.5));
  EXPECT_THROW(DensitySpec::power_tail(1.0), DomainError);
  EXPECT_THROW(DensitySpec::custom([](double) { return 2.0; }), DomainError);
  const LocalAlternative n = LocalAlternative::from_normalized(spec, 0.05);
  EXPECT_NEAR(n.theta(), 0.05 / normalize_score(spec).c(), 1e-15);
}

TEST(AltModel, HeavyTailCertificate) {
  for (double r : {0.5, 0.6, 0.7, 0.9}) {
    const HeavyTailCertificate c = check_heavy_tail(DensitySpec::power_tail(r), r);
    EXPECT_GT(c.c1, 0.0);
    EXPECT_GE(c.c2, c.c1);
    EXPECT_EQ(c.grid_points_checked, 10000u);
  }
  const HeavyTailCertificate custom = check_heavy_tail(power_as_custom(0.6, true), 0.6);
  EXPECT_GT(custom.c1, 0.0);
  // A bounded f is not heavy tailed at any r.
  const DensitySpec tri = DensitySpec::custom([](double t) { return 2.0 * (1.0 - t); });
  EXPECT_THROW(check_heavy_tail(tri, 0.6), ConditionViolated);
  EXPECT_THROW(check_heavy_tail(DensitySpec::power_tail(0.7), 0.3), DomainError);
}
