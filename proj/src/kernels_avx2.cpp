#include "rhoest/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace rhoest::kernels::avx2 {
namespace {

__attribute__((target("avx2"))) double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

} // namespace

// No FMA: p*p + q*q must stay commutative so that swapping p and q negates
// the result bit for bit.
__attribute__((target("avx2"))) double psi_sum(const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vp = _mm256_loadu_pd(p + i);
    __m256d vq = _mm256_loadu_pd(q + i);
    __m256d den = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(vp, vp), _mm256_mul_pd(vq, vq)));
    __m256d term = _mm256_div_pd(_mm256_sub_pd(vq, vp), den);
    __m256d live = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(term, live));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    double den = std::sqrt(p[i] * p[i] + q[i] * q[i]);
    if (den > 0.0)
      sum += (q[i] - p[i]) / den;
  }
  return sum;
}

__attribute__((target("avx2"))) double weighted_sqrt_product(const double* w, const double* a,
                                                             const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_sqrt_pd(prod)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i)
    sum += w[i] * std::sqrt(a[i] * b[i]);
  return sum;
}

} // namespace rhoest::kernels::avx2

#else

namespace rhoest::kernels::avx2 {

double psi_sum(const double* p, const double* q, std::size_t n) {
  return scalar::psi_sum(p, q, n);
}

double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n) {
  return scalar::weighted_sqrt_product(w, a, b, n);
}

} // namespace rhoest::kernels::avx2

#endif
