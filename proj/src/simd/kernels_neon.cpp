#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace blgi::simd {
namespace neon {

// One complex number per register: [re, im].
inline float64x2_t cmul_broadcast(Complex a, float64x2_t b) {
  static const double kSign[2] = {-1.0, 1.0};
  const float64x2_t ar = vdupq_n_f64(a.real());
  const float64x2_t ai = vdupq_n_f64(a.imag());
  const float64x2_t b_swapped = vextq_f64(b, b, 1);
  // (ar*br + (-(ai*bi)), ar*bi + ai*br): a + (-b) rounds exactly as a - b.
  return vaddq_f64(vmulq_f64(ar, b), vmulq_f64(vmulq_f64(ai, b_swapped), vld1q_f64(kSign)));
}

void mat4_mul(const Complex* a, const Complex* b, Complex* out) {
  const double* bd = reinterpret_cast<const double*>(b);
  double* od = reinterpret_cast<double*>(out);
  for (int r = 0; r < 4; ++r) {
    float64x2_t acc[4];
    for (int c = 0; c < 4; ++c) {
      acc[c] = cmul_broadcast(a[4 * r], vld1q_f64(bd + 2 * c));
    }
    for (int k = 1; k < 4; ++k) {
      for (int c = 0; c < 4; ++c) {
        acc[c] = vaddq_f64(acc[c], cmul_broadcast(a[4 * r + k], vld1q_f64(bd + 8 * k + 2 * c)));
      }
    }
    for (int c = 0; c < 4; ++c) {
      vst1q_f64(od + 8 * r + 2 * c, acc[c]);
    }
  }
}

void mat4_mul_adjoint(const Complex* a, const Complex* b, Complex* out) {
  Complex bh[16];
  detail::adjoint4(b, bh);
  mat4_mul(a, bh, out);
}

double mat4_trace_product(const Complex* a, const Complex* b) {
  Complex bt[16];
  detail::transpose4(b, bt);
  const double* ad = reinterpret_cast<const double*>(a);
  const double* td = reinterpret_cast<const double*>(bt);
  // Even complex index -> lanes 0/1, odd -> lanes 2/3, as in the scalar layout.
  float64x2_t even = vmulq_f64(vld1q_f64(ad), vld1q_f64(td));
  float64x2_t odd = vmulq_f64(vld1q_f64(ad + 2), vld1q_f64(td + 2));
  for (int j = 1; j < 8; ++j) {
    even = vaddq_f64(even, vmulq_f64(vld1q_f64(ad + 4 * j), vld1q_f64(td + 4 * j)));
    odd = vaddq_f64(odd, vmulq_f64(vld1q_f64(ad + 4 * j + 2), vld1q_f64(td + 4 * j + 2)));
  }
  return (vgetq_lane_f64(even, 0) - vgetq_lane_f64(even, 1)) +
         (vgetq_lane_f64(odd, 0) - vgetq_lane_f64(odd, 1));
}

void sum_sumsq(const double* x, std::size_t n, double* sum, double* sumsq) {
  float64x2_t s01 = vdupq_n_f64(0.0);
  float64x2_t s23 = vdupq_n_f64(0.0);
  float64x2_t q01 = vdupq_n_f64(0.0);
  float64x2_t q23 = vdupq_n_f64(0.0);
  const std::size_t full = n - n % 4;
  for (std::size_t i = 0; i < full; i += 4) {
    const float64x2_t lo = vld1q_f64(x + i);
    const float64x2_t hi = vld1q_f64(x + i + 2);
    s01 = vaddq_f64(s01, lo);
    s23 = vaddq_f64(s23, hi);
    q01 = vaddq_f64(q01, vmulq_f64(lo, lo));
    q23 = vaddq_f64(q23, vmulq_f64(hi, hi));
  }
  double sl[4];
  double ql[4];
  vst1q_f64(sl, s01);
  vst1q_f64(sl + 2, s23);
  vst1q_f64(ql, q01);
  vst1q_f64(ql + 2, q23);
  detail::finish_lanes(sl, ql, x + full, n - full, sum, sumsq);
}

}  // namespace neon

const KernelTable& neon_table() {
  static const KernelTable table{"neon", &neon::mat4_mul, &neon::mat4_mul_adjoint,
                                 &neon::mat4_trace_product, &neon::sum_sumsq};
  return table;
}

}  // namespace blgi::simd
