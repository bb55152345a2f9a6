#include <immintrin.h>

#include "kernels_internal.hpp"

namespace blgi::simd {
namespace avx2 {

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul_broadcast(Complex a, __m256d b) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const __m256d b_swapped = _mm256_permute_pd(b, 0b0101);
  return _mm256_addsub_pd(_mm256_mul_pd(ar, b), _mm256_mul_pd(ai, b_swapped));
}

void mat4_mul(const Complex* a, const Complex* b, Complex* out) {
  const double* bd = reinterpret_cast<const double*>(b);
  double* od = reinterpret_cast<double*>(out);
  __m256d rows[8];
  for (int k = 0; k < 4; ++k) {
    rows[2 * k] = _mm256_loadu_pd(bd + 8 * k);
    rows[2 * k + 1] = _mm256_loadu_pd(bd + 8 * k + 4);
  }
  for (int r = 0; r < 4; ++r) {
    __m256d lo = cmul_broadcast(a[4 * r], rows[0]);
    __m256d hi = cmul_broadcast(a[4 * r], rows[1]);
    for (int k = 1; k < 4; ++k) {
      lo = _mm256_add_pd(lo, cmul_broadcast(a[4 * r + k], rows[2 * k]));
      hi = _mm256_add_pd(hi, cmul_broadcast(a[4 * r + k], rows[2 * k + 1]));
    }
    _mm256_storeu_pd(od + 8 * r, lo);
    _mm256_storeu_pd(od + 8 * r + 4, hi);
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
  __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(ad), _mm256_loadu_pd(td));
  for (int j = 1; j < 8; ++j) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(ad + 4 * j), _mm256_loadu_pd(td + 4 * j)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] - lane[1]) + (lane[2] - lane[3]);
}

void sum_sumsq(const double* x, std::size_t n, double* sum, double* sumsq) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  const std::size_t full = n - n % 4;
  for (std::size_t i = 0; i < full; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    s = _mm256_add_pd(s, v);
    q = _mm256_add_pd(q, _mm256_mul_pd(v, v));
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
  detail::finish_lanes(sl, ql, x + full, n - full, sum, sumsq);
}

}  // namespace avx2

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", &avx2::mat4_mul, &avx2::mat4_mul_adjoint,
                                 &avx2::mat4_trace_product, &avx2::sum_sumsq};
  return table;
}

}  // namespace blgi::simd
