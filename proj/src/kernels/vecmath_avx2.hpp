#pragma once

// Four-lane double log/exp for AVX2+FMA, after the fdlibm reductions
// (e_log.c, e_exp.c). Inputs are restricted to what the kernels feed them:
// log takes positive normal numbers, exp clamps its argument to [-708, 709].

#include <immintrin.h>

#include <cstdint>

namespace arelab::kernels::vm {

inline __m256d set1(double x) { return _mm256_set1_pd(x); }

// Exact int64 -> double for |k| < 2^51.
inline __m256d small_int64_to_double(__m256i k) {
  const __m256i magic_i = _mm256_set1_epi64x(0x4338000000000000LL);
  const __m256d magic_d = set1(6755399441055744.0);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(k, magic_i)), magic_d);
}

// Exact double -> int64 for integral |x| < 2^51.
inline __m256i small_double_to_int64(__m256d x) {
  const __m256d magic_d = set1(6755399441055744.0);
  const __m256i magic_i = _mm256_set1_epi64x(0x4338000000000000LL);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(x, magic_d)), magic_i);
}

inline __m256d log(__m256d x) {
  const __m256d ln2_hi = set1(6.93147180369123816490e-01);
  const __m256d ln2_lo = set1(1.90821492927058770002e-10);
  const __m256d lg1 = set1(6.666666666666735130e-01);
  const __m256d lg2 = set1(3.999999999940941908e-01);
  const __m256d lg3 = set1(2.857142874366239149e-01);
  const __m256d lg4 = set1(2.222219843214978396e-01);
  const __m256d lg5 = set1(1.818357216161805012e-01);
  const __m256d lg6 = set1(1.531383769920937332e-01);
  const __m256d lg7 = set1(1.479819860511658591e-01);

  const __m256i bits = _mm256_castpd_si256(x);
  __m256i k = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  const __m256i mant_bits =
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);
  // Move m into [sqrt(2)/2, sqrt(2)).
  const __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  k = _mm256_add_epi64(k, _mm256_and_si256(_mm256_castpd_si256(big), _mm256_set1_epi64x(1)));
  const __m256d dk = small_int64_to_double(k);

  const __m256d f = _mm256_sub_pd(m, set1(1.0));
  const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(set1(0.5), f), f);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(set1(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 =
      _mm256_mul_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg6, lg4), lg2));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg7, lg5), lg3), lg1));
  const __m256d R = _mm256_add_pd(t2, t1);
  // k ln2_hi - ((hfsq - (s (hfsq + R) + k ln2_lo)) - f)
  const __m256d inner = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, R), _mm256_mul_pd(dk, ln2_lo));
  return _mm256_fmsub_pd(dk, ln2_hi, _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

// log1p(y) for y > -1 via log(1 + y) with the first-order correction
// (y - ((1 + y) - 1)) / (1 + y).
inline __m256d log1p(__m256d y) {
  const __m256d u = _mm256_add_pd(set1(1.0), y);
  const __m256d corr = _mm256_div_pd(_mm256_sub_pd(y, _mm256_sub_pd(u, set1(1.0))), u);
  return _mm256_add_pd(log(u), corr);
}

inline __m256d exp(__m256d x) {
  const __m256d ln2_hi = set1(6.93147180369123816490e-01);
  const __m256d ln2_lo = set1(1.90821492927058770002e-10);
  const __m256d inv_ln2 = set1(1.44269504088896338700e+00);
  const __m256d p1 = set1(1.66666666666666019037e-01);
  const __m256d p2 = set1(-2.77777777770155933842e-03);
  const __m256d p3 = set1(6.61375632143793436117e-05);
  const __m256d p4 = set1(-1.65339022054652515390e-06);
  const __m256d p5 = set1(4.13813679705723846039e-08);

  x = _mm256_max_pd(_mm256_min_pd(x, set1(709.0)), set1(-708.0));
  const __m256d dk =
      _mm256_round_pd(_mm256_mul_pd(x, inv_ln2), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_fnmadd_pd(dk, ln2_hi, x);
  const __m256d lo = _mm256_mul_pd(dk, ln2_lo);
  const __m256d r = _mm256_sub_pd(hi, lo);
  const __m256d t = _mm256_mul_pd(r, r);
  const __m256d poly = _mm256_fmadd_pd(
      t, _mm256_fmadd_pd(t, _mm256_fmadd_pd(t, _mm256_fmadd_pd(t, p5, p4), p3), p2), p1);
  const __m256d c = _mm256_fnmadd_pd(t, poly, r);
  // 1 - ((lo - (r c) / (2 - c)) - hi)
  const __m256d rc = _mm256_div_pd(_mm256_mul_pd(r, c), _mm256_sub_pd(set1(2.0), c));
  const __m256d y = _mm256_sub_pd(set1(1.0), _mm256_sub_pd(_mm256_sub_pd(lo, rc), hi));
  // Scale by 2^k in two halves so that k = 1024 and k = -1022 stay exact.
  const __m256i k = small_double_to_int64(dk);
  const __m256i k1 = _mm256_srai_epi32(k, 1);  // k is small: low 32 bits carry the value
  const __m256i k2 = _mm256_sub_epi64(k, k1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s1 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(k1, bias), 52));
  const __m256d s2 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(k2, bias), 52));
  return _mm256_mul_pd(_mm256_mul_pd(y, s1), s2);
}

}  // namespace arelab::kernels::vm
