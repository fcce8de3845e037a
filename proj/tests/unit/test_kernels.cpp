#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "arelab/errors.hpp"
#include "arelab/kernels.hpp"
#include "arelab/rng.hpp"

using namespace arelab;
using kernels::Isa;

namespace {

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!kernels::supported(Isa::avx2)) GTEST_SKIP() << "CPU without AVX2";
  }
  const kernels::KernelTable& s = kernels::table(Isa::scalar);
  const kernels::KernelTable& v() { return kernels::table(Isa::avx2); }
};

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  std::vector<double> u(n);
  rng::Stream(seed, rng::Op::user, 0, 0).fill_uniforms(u);
  return u;
}

// Odd lengths exercise the vector tails.
constexpr std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 17, 1023, 4099};

}  // namespace

TEST_F(Avx2Equivalence, PhiloxBitIdentical) {
  for (std::size_t blocks : {1u, 2u, 3u, 5u, 64u, 257u}) {
    std::vector<double> a(4 * blocks), b(4 * blocks);
    s.philox_uniforms(11, 22, 33, 17, a.data(), blocks);
    v().philox_uniforms(11, 22, 33, 17, b.data(), blocks);
    ASSERT_EQ(a, b) << blocks;
  }
}

TEST_F(Avx2Equivalence, LogDensityClose) {
  for (double r : {0.3, 0.4, 0.6, 0.7, 0.95}) {
    for (double theta : {0.02, 0.1, 0.5}) {
      const kernels::PowerTailParams p{theta, r};
      for (std::size_t n : kLengths) {
        std::vector<double> x = uniforms(n, n + 1);
        for (std::size_t i = 0; i < n; i += 5) x[i] = std::pow(x[i], 30.0);  // deep tail
        std::vector<double> a(n), b(n);
        s.power_tail_log_density(x.data(), a.data(), n, p);
        v().power_tail_log_density(x.data(), b.data(), n, p);
        for (std::size_t i = 0; i < n; ++i) {
          ASSERT_NEAR(a[i], b[i], 1e-13 * std::max(1.0, std::fabs(a[i]))) << x[i];
        }
        const double sa = s.power_tail_log_density_sum(x.data(), n, p);
        const double sb = v().power_tail_log_density_sum(x.data(), n, p);
        double abs_sum = 0;
        for (double y : a) abs_sum += std::fabs(y);
        ASSERT_NEAR(sa, sb, 1e-13 * std::max(1.0, abs_sum));
      }
    }
  }
}

TEST_F(Avx2Equivalence, QuantileClose) {
  for (double r : {0.3, 0.6, 0.7}) {
    for (double theta : {0.02, 0.1, 0.9}) {
      const kernels::PowerTailParams p{theta, r};
      for (std::size_t n : kLengths) {
        std::vector<double> a = uniforms(n, 77 + n), b = a;
        s.power_tail_quantile(a.data(), n, p);
        v().power_tail_quantile(b.data(), n, p);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(a[i], b[i], 1e-13 * std::max(a[i], 1e-300) + 1e-300);
      }
    }
  }
}

TEST_F(Avx2Equivalence, KsGapExact) {
  for (std::size_t n : kLengths) {
    if (n == 0) continue;
    std::vector<double> x = uniforms(n, 5 * n);
    std::sort(x.begin(), x.end());
    ASSERT_EQ(s.ks_max_gap(x.data(), n), v().ks_max_gap(x.data(), n)) << n;
  }
}

TEST_F(Avx2Equivalence, BandExceededExact) {
  for (std::size_t n : kLengths) {
    if (n == 0) continue;
    std::vector<double> x = uniforms(n, 3 * n);
    std::sort(x.begin(), x.end());
    for (double width : {0.01, 0.05, 0.2, 1.0}) {
      std::vector<double> lo(n), hi(n);
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = (i + 1.0) / n - width;
        hi[i] = static_cast<double>(i) / n + width;
      }
      ASSERT_EQ(s.band_exceeded(x.data(), lo.data(), hi.data(), n),
                v().band_exceeded(x.data(), lo.data(), hi.data(), n))
          << n << ' ' << width;
    }
  }
}

TEST(KernelDispatch, ScalarReference) {
  // Largest ECDF gap: 0.5 for {0.5}, 1 - 0.2 for {0.1, 0.2}.
  const double one[] = {0.5};
  const double two[] = {0.1, 0.2};
  EXPECT_DOUBLE_EQ(kernels::table(Isa::scalar).ks_max_gap(one, 1), 0.5);
  EXPECT_DOUBLE_EQ(kernels::table(Isa::scalar).ks_max_gap(two, 2), 0.8);
}

TEST(KernelDispatch, SelectAndParse) {
  EXPECT_EQ(kernels::parse_isa("scalar"), Isa::scalar);
  EXPECT_THROW(kernels::parse_isa("sse9"), Error);
  const Isa before = kernels::active().isa;
  kernels::select(Isa::scalar);
  EXPECT_EQ(kernels::active().isa, Isa::scalar);
  kernels::select(before);
  EXPECT_EQ(kernels::isa_name(Isa::avx2), "avx2");
}
