#include <immintrin.h>

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "arelab/rng.hpp"
#include "kernel_tables.hpp"
#include "vecmath_avx2.hpp"

namespace arelab::kernels::detail {

namespace {

// 32x32 -> 64 multiply of every 32-bit lane by the constant in `m`.
inline void mulhilo8(__m256i m, __m256i c, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(c, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(c, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

inline __m256d words_to_open_unit(__m256i words) {
  const __m256i mant = _mm256_or_si256(_mm256_srli_epi64(words, 12),
                                       _mm256_set1_epi64x(0x3FF0000000000000LL));
  return _mm256_add_pd(_mm256_sub_pd(_mm256_castsi256_pd(mant), _mm256_set1_pd(1.0)),
                       _mm256_set1_pd(0x1.0p-53));
}

void philox_uniforms(std::uint32_t k0, std::uint32_t k1, std::uint64_t stream,
                     std::uint64_t first_block, double* out, std::size_t blocks) {
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(0xD2511F53u));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(0xCD9E8D57u));
  const __m256i s_lo = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream)));
  const __m256i s_hi =
      _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream >> 32)));

  std::size_t b = 0;
  for (; b + 8 <= blocks; b += 8) {
    alignas(32) std::uint32_t lo_words[8];
    alignas(32) std::uint32_t hi_words[8];
    for (int j = 0; j < 8; ++j) {
      const std::uint64_t block = first_block + b + static_cast<std::uint64_t>(j);
      lo_words[j] = static_cast<std::uint32_t>(block);
      hi_words[j] = static_cast<std::uint32_t>(block >> 32);
    }
    __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo_words));
    __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi_words));
    __m256i c2 = s_lo;
    __m256i c3 = s_hi;
    std::uint32_t key0 = k0;
    std::uint32_t key1 = k1;
    for (int round = 0; round < 10; ++round) {
      __m256i hi0, lo0, hi1, lo1;
      mulhilo8(m0, c0, hi0, lo0);
      mulhilo8(m1, c2, hi1, lo1);
      const __m256i vk0 = _mm256_set1_epi32(static_cast<int>(key0));
      const __m256i vk1 = _mm256_set1_epi32(static_cast<int>(key1));
      c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), vk0);
      c1 = lo1;
      c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), vk1);
      c3 = lo0;
      key0 += 0x9E3779B9u;
      key1 += 0xBB67AE85u;
    }
    // 64-bit words: a = (w1 << 32) | w0, b = (w3 << 32) | w2 per block.
    const __m256d a_lo = words_to_open_unit(_mm256_unpacklo_epi32(c0, c1));  // blocks 0 1 4 5
    const __m256d a_hi = words_to_open_unit(_mm256_unpackhi_epi32(c0, c1));  // blocks 2 3 6 7
    const __m256d b_lo = words_to_open_unit(_mm256_unpacklo_epi32(c2, c3));
    const __m256d b_hi = words_to_open_unit(_mm256_unpackhi_epi32(c2, c3));

    const __m256d p0 = _mm256_unpacklo_pd(a_lo, b_lo);  // 0a 0b 4a 4b
    const __m256d p1 = _mm256_unpackhi_pd(a_lo, b_lo);  // 1a 1b 5a 5b
    const __m256d p2 = _mm256_unpacklo_pd(a_hi, b_hi);  // 2a 2b 6a 6b
    const __m256d p3 = _mm256_unpackhi_pd(a_hi, b_hi);  // 3a 3b 7a 7b
    double* dst = out + 2 * b;
    _mm256_storeu_pd(dst + 0, _mm256_permute2f128_pd(p0, p1, 0x20));
    _mm256_storeu_pd(dst + 4, _mm256_permute2f128_pd(p2, p3, 0x20));
    _mm256_storeu_pd(dst + 8, _mm256_permute2f128_pd(p0, p1, 0x31));
    _mm256_storeu_pd(dst + 12, _mm256_permute2f128_pd(p2, p3, 0x31));
  }
  if (b < blocks) {
    kScalarTable.philox_uniforms(k0, k1, stream, first_block + b, out + 2 * b, blocks - b);
  }
}

inline __m256d log_density4(__m256d x, double theta, double r) {
  const __m256d pw = vm::exp(_mm256_mul_pd(_mm256_set1_pd(-r), vm::log(x)));
  const __m256d f = _mm256_mul_pd(_mm256_set1_pd(1.0 - r), pw);
  const __m256d vtheta = _mm256_set1_pd(theta);
  const __m256d y = _mm256_mul_pd(vtheta, _mm256_sub_pd(f, _mm256_set1_pd(1.0)));
  const __m256d abs_y = _mm256_andnot_pd(_mm256_set1_pd(-0.0), y);
  const __m256d small = _mm256_cmp_pd(abs_y, _mm256_set1_pd(0.5), _CMP_LE_OQ);
  const __m256d near = vm::log1p(y);
  const __m256d far = vm::log(_mm256_add_pd(_mm256_set1_pd(1.0 - theta), _mm256_mul_pd(vtheta, f)));
  return _mm256_blendv_pd(far, near, small);
}

inline __m256d load_tail(const double* x, std::size_t count, double fill) {
  alignas(32) double buf[4] = {fill, fill, fill, fill};
  std::copy_n(x, count, buf);
  return _mm256_load_pd(buf);
}

void power_tail_log_density(const double* x, double* out, std::size_t n, PowerTailParams p) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, log_density4(_mm256_loadu_pd(x + i), p.theta, p.r));
  }
  if (i < n) {
    alignas(32) double buf[4];
    _mm256_store_pd(buf, log_density4(load_tail(x + i, n - i, 0.5), p.theta, p.r));
    std::copy_n(buf, n - i, out + i);
  }
}

double power_tail_log_density_sum(const double* x, std::size_t n, PowerTailParams p) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, log_density4(_mm256_loadu_pd(x + i), p.theta, p.r));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (i < n) {
    alignas(32) double buf[4];
    _mm256_store_pd(buf, log_density4(load_tail(x + i, n - i, 0.5), p.theta, p.r));
    for (std::size_t j = 0; j < n - i; ++j) sum += buf[j];
  }
  return sum;
}

inline __m256d quantile4(__m256d u, double theta, double r) {
  const __m256d a = _mm256_set1_pd(1.0 - theta);
  const __m256d b = _mm256_set1_pd(theta);
  const __m256d q = _mm256_set1_pd(1.0 / (1.0 - r));
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d tiny = _mm256_set1_pd(DBL_MIN);
  const __m256d neg_r = _mm256_set1_pd(-r);
  const __m256d b_slope = _mm256_set1_pd(theta * (1.0 - r));
  const __m256d rel = _mm256_set1_pd(kQuantileRelStep);

  const __m256d t_up = _mm256_max_pd(
      _mm256_min_pd(_mm256_div_pd(u, a), vm::exp(_mm256_mul_pd(q, vm::log(_mm256_div_pd(u, b))))),
      tiny);
  const __m256d hu = _mm256_mul_pd(half, u);
  const __m256d t_lo = _mm256_max_pd(
      _mm256_min_pd(_mm256_div_pd(hu, a), vm::exp(_mm256_mul_pd(q, vm::log(_mm256_div_pd(hu, b))))),
      tiny);
  __m256d t = t_up;
  __m256d active = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  for (int it = 0; it < kQuantileMaxIterations; ++it) {
    const __m256d pr = vm::exp(_mm256_mul_pd(neg_r, vm::log(t)));
    const __m256d F = _mm256_add_pd(_mm256_mul_pd(a, t), _mm256_mul_pd(_mm256_mul_pd(b, t), pr));
    const __m256d dF = _mm256_add_pd(a, _mm256_mul_pd(b_slope, pr));
    __m256d next = _mm256_sub_pd(t, _mm256_div_pd(_mm256_sub_pd(F, u), dF));
    next = _mm256_max_pd(t_lo, _mm256_min_pd(next, t_up));
    const __m256d step = _mm256_andnot_pd(_mm256_set1_pd(-0.0), _mm256_sub_pd(next, t));
    const __m256d done = _mm256_cmp_pd(step, _mm256_mul_pd(rel, next), _CMP_LE_OQ);
    t = _mm256_blendv_pd(t, next, active);
    active = _mm256_andnot_pd(done, active);
    if (_mm256_movemask_pd(active) == 0) break;
  }
  return t;
}

void power_tail_quantile(double* values, std::size_t n, PowerTailParams p) {
  if (p.theta == 0.0) return;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(values + i, quantile4(_mm256_loadu_pd(values + i), p.theta, p.r));
  }
  if (i < n) {
    alignas(32) double buf[4];
    _mm256_store_pd(buf, quantile4(load_tail(values + i, n - i, 0.5), p.theta, p.r));
    std::copy_n(buf, n - i, values + i);
  }
}

double ks_max_gap(const double* sorted, std::size_t n) {
  const __m256d nn = _mm256_set1_pd(static_cast<double>(n));
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(sorted + i);
    const __m256d plus = _mm256_sub_pd(_mm256_div_pd(_mm256_add_pd(idx, one), nn), x);
    const __m256d minus = _mm256_sub_pd(x, _mm256_div_pd(idx, nn));
    best = _mm256_max_pd(best, _mm256_max_pd(plus, minus));
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double d = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  const double dn = static_cast<double>(n);
  for (; i < n; ++i) {
    const double k = static_cast<double>(i);
    d = std::max(d, std::max((k + 1.0) / dn - sorted[i], sorted[i] - k / dn));
  }
  return d;
}

bool band_exceeded(const double* sorted, const double* lower, const double* upper,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(sorted + i);
    const __m256d x1 = _mm256_loadu_pd(sorted + i + 4);
    const __m256d out0 = _mm256_or_pd(_mm256_cmp_pd(x0, _mm256_loadu_pd(lower + i), _CMP_LE_OQ),
                                      _mm256_cmp_pd(x0, _mm256_loadu_pd(upper + i), _CMP_GE_OQ));
    const __m256d out1 =
        _mm256_or_pd(_mm256_cmp_pd(x1, _mm256_loadu_pd(lower + i + 4), _CMP_LE_OQ),
                     _mm256_cmp_pd(x1, _mm256_loadu_pd(upper + i + 4), _CMP_GE_OQ));
    if (_mm256_movemask_pd(_mm256_or_pd(out0, out1)) != 0) return true;
  }
  for (; i < n; ++i) {
    if (sorted[i] <= lower[i] || sorted[i] >= upper[i]) return true;
  }
  return false;
}

}  // namespace

const KernelTable kAvx2Table{
    Isa::avx2,
    "avx2",
    &philox_uniforms,
    &power_tail_log_density,
    &power_tail_log_density_sum,
    &power_tail_quantile,
    &ks_max_gap,
    &band_exceeded,
};

}  // namespace arelab::kernels::detail
