#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "arelab/errors.hpp"
#include "arelab/rng.hpp"
#include "arelab/test_stats.hpp"

using namespace arelab;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t rep) {
  std::vector<double> u(n);
  rng::Stream(77, rng::Op::user, n, rep).fill_uniforms(u);
  return u;
}

// Anderson-Darling A^2 against a fully specified N(0, 1).
double anderson_darling_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double lo = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    const double hi = 0.5 * std::erfc(z[z.size() - 1 - i] / std::sqrt(2.0));
    s += (2.0 * i + 1.0) * (std::log(lo) + std::log(hi));
  }
  return -n - s / n;
}

}  // namespace

TEST(KsStatistic, SingleObservation) {
  for (double x : {1e-9, 0.2, 0.5, 0.75, 1 - 1e-9}) {
    EXPECT_DOUBLE_EQ(ks_statistic(Sample({x})), std::max(x, 1 - x));
  }
}

TEST(KsStatistic, BruteForceSup) {
  const std::vector<double> x = uniforms(37, 1);
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  // sup over t of |F_n(t) - t| is attained just before or at a jump.
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto below = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v < sorted[i]; }));
    const auto upto = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v <= sorted[i]; }));
    d = std::max({d, std::fabs(below / 37 - sorted[i]), std::fabs(upto / 37 - sorted[i])});
  }
  EXPECT_NEAR(ks_statistic(Sample(x)), std::sqrt(37.0) * d, 1e-14);
}

TEST(KsStatistic, PermutationInvariantAndBounded) {
  std::mt19937_64 gen(5);
  for (std::size_t n : {2u, 10u, 500u}) {
    std::vector<double> x = uniforms(n, n);
    const double k = ks_statistic(Sample(x));
    EXPECT_GT(k / std::sqrt(double(n)), 0.0);
    EXPECT_LE(k / std::sqrt(double(n)), 1.0);
    for (int rep = 0; rep < 5; ++rep) {
      std::shuffle(x.begin(), x.end(), gen);
      EXPECT_EQ(ks_statistic(Sample(x)), k);
    }
  }
}

TEST(KsStatistic, TiesAllowed) {
  const double k = ks_statistic(Sample({0.3, 0.3, 0.3, 0.9}));
  EXPECT_NEAR(k, 2.0 * 0.45, 1e-15);
}

TEST(NpStatistic, AdditiveOverSplits) {
  const LocalAlternative alt(DensitySpec::power_tail(0.6), 0.05);
  const MomentSet m = log_moments(alt);
  std::mt19937_64 gen(9);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> x = uniforms(200, rep);
    const std::size_t cut = 1 + gen() % 198;
    const std::vector<double> a(x.begin(), x.begin() + cut), b(x.begin() + cut, x.end());
    const double whole = np_statistic(Sample(x), alt, m) * std::sqrt(200.0);
    const double parts = np_statistic(Sample(a), alt, m) * std::sqrt(double(a.size())) +
                         np_statistic(Sample(b), alt, m) * std::sqrt(double(b.size()));
    EXPECT_NEAR(whole, parts, 1e-12);
  }
}

TEST(NpStatistic, DirectFormula) {
  const LocalAlternative alt(DensitySpec::power_tail(0.3), 0.2);
  const MomentSet m = log_moments(alt);
  const std::vector<double> x = uniforms(11, 3);
  double s = 0.0;
  for (double v : x) s += std::log(0.8 + 0.2 * 0.7 * std::pow(v, -0.3));
  EXPECT_NEAR(np_statistic(Sample(x), alt, m), (s - 11 * m.e0) / (std::sqrt(11.0) * m.sigma0()), 1e-12);
  const DensitySpec custom = DensitySpec::custom([](double t) { return 0.7 * std::pow(t, -0.3); });
  EXPECT_NEAR(log_likelihood_sum(x, LocalAlternative(custom, 0.2)), s, 1e-12);
}

TEST(NpStatistic, NullApproximatelyStandardNormal) {
  const LocalAlternative alt(DensitySpec::power_tail(0.3), 0.1);
  const MomentSet m = log_moments(alt);
  std::vector<double> v(10000);
  for (std::size_t rep = 0; rep < v.size(); ++rep) v[rep] = np_statistic(Sample(uniforms(2000, rep)), alt, m);
  // 0.1% point of the case-0 Anderson-Darling limit law.
  EXPECT_LT(anderson_darling_normal(v), 5.97);
}

TEST(Sample, RejectsOutOfRange) {
  EXPECT_THROW(Sample({}), DomainError);
  EXPECT_THROW(Sample({0.5, 0.0}), DomainError);
  EXPECT_THROW(Sample({1.0}), DomainError);
  EXPECT_THROW(Sample({std::nan("")}), DomainError);
}
