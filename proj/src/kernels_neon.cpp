#include "rhoest/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace rhoest::kernels::neon {

double psi_sum(const double* p, const double* q, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vp = vld1q_f64(p + i);
    float64x2_t vq = vld1q_f64(q + i);
    float64x2_t den = vsqrtq_f64(vaddq_f64(vmulq_f64(vp, vp), vmulq_f64(vq, vq)));
    float64x2_t term = vdivq_f64(vsubq_f64(vq, vp), den);
    uint64x2_t live = vcgtq_f64(den, zero);
    term = vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(term), live));
    acc = vaddq_f64(acc, term);
  }
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    double den = std::sqrt(p[i] * p[i] + q[i] * q[i]);
    if (den > 0.0)
      sum += (q[i] - p[i]) / den;
  }
  return sum;
}

double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t prod = vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(w + i), vsqrtq_f64(prod)));
  }
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i)
    sum += w[i] * std::sqrt(a[i] * b[i]);
  return sum;
}

} // namespace rhoest::kernels::neon

#else

namespace rhoest::kernels::neon {

double psi_sum(const double* p, const double* q, std::size_t n) {
  return scalar::psi_sum(p, q, n);
}

double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n) {
  return scalar::weighted_sqrt_product(w, a, b, n);
}

} // namespace rhoest::kernels::neon

#endif
