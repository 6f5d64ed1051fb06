// Compiled with -mavx2. Only reached through the runtime dispatch in
// kernels.cpp; keep this translation unit free of shared inline code.

#include "folbm/kernels.hpp"

#if defined(FOLBM_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace folbm::kernels::avx2 {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

double sum_sq_diff(const double* v, std::size_t n) {
  if (n < 2) return 0.0;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 1;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(v + i - 1));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = v[i] - v[i - 1];
    s += d * d;
  }
  return s;
}

SumStats sum_and_sum_sq(const double* v, std::size_t n) {
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    s1 = _mm256_add_pd(s1, x);
    s2 = _mm256_add_pd(s2, _mm256_mul_pd(x, x));
  }
  SumStats out{hsum(s1), hsum(s2)};
  for (; i < n; ++i) {
    out.sum += v[i];
    out.sum_sq += v[i] * v[i];
  }
  return out;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  double out = hmax(m);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > out) out = d;
  }
  return out;
}

void bin_indices(const double* angles, std::size_t n, int bins, int* out) {
  const double scale_s = static_cast<double>(bins) / kTwoPi;
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d scale = _mm256_set1_pd(scale_s);
  const __m128i lo = _mm_setzero_si128();
  const __m128i hi = _mm_set1_epi32(bins - 1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(angles + i);
    const __m256d turns = _mm256_floor_pd(_mm256_div_pd(a, two_pi));
    __m256d r = _mm256_sub_pd(a, _mm256_mul_pd(two_pi, turns));
    const __m256d over = _mm256_cmp_pd(r, two_pi, _CMP_GE_OQ);
    r = _mm256_sub_pd(r, _mm256_and_pd(over, two_pi));
    const __m256d k = _mm256_floor_pd(_mm256_mul_pd(r, scale));
    __m128i ki = _mm256_cvttpd_epi32(k);
    ki = _mm_min_epi32(_mm_max_epi32(ki, lo), hi);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), ki);
  }
  for (; i < n; ++i) {
    double r = angles[i] - kTwoPi * std::floor(angles[i] / kTwoPi);
    if (r >= kTwoPi) r -= kTwoPi;
    int k = static_cast<int>(std::floor(r * scale_s));
    if (k >= bins) k = bins - 1;
    if (k < 0) k = 0;
    out[i] = k;
  }
}

}  // namespace folbm::kernels::avx2

#else

#include <cstdlib>

namespace folbm::kernels::avx2 {
double sum_sq_diff(const double*, std::size_t) { std::abort(); }
SumStats sum_and_sum_sq(const double*, std::size_t) { std::abort(); }
double dot(const double*, const double*, std::size_t) { std::abort(); }
double max_abs_diff(const double*, const double*, std::size_t) { std::abort(); }
void bin_indices(const double*, std::size_t, int, int*) { std::abort(); }
}  // namespace folbm::kernels::avx2

#endif
