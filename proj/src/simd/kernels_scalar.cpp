#include "kernels_internal.hpp"

namespace blgi::simd {
namespace {

struct Pair {
  double re;
  double im;
};

// (ar*br - ai*bi, ar*bi + ai*br) without the NaN recovery of operator*.
inline Pair cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void mat4_mul(const Complex* a, const Complex* b, Complex* out) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Pair acc = cmul(a[4 * r], b[c]);
      for (int k = 1; k < 4; ++k) {
        const Pair p = cmul(a[4 * r + k], b[4 * k + c]);
        acc.re = acc.re + p.re;
        acc.im = acc.im + p.im;
      }
      out[4 * r + c] = Complex(acc.re, acc.im);
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
  // Lanes follow the AVX2 layout: two complex numbers per 256-bit register.
  double lane[4];
  lane[0] = a[0].real() * bt[0].real();
  lane[1] = a[0].imag() * bt[0].imag();
  lane[2] = a[1].real() * bt[1].real();
  lane[3] = a[1].imag() * bt[1].imag();
  for (int j = 1; j < 8; ++j) {
    lane[0] = lane[0] + a[2 * j].real() * bt[2 * j].real();
    lane[1] = lane[1] + a[2 * j].imag() * bt[2 * j].imag();
    lane[2] = lane[2] + a[2 * j + 1].real() * bt[2 * j + 1].real();
    lane[3] = lane[3] + a[2 * j + 1].imag() * bt[2 * j + 1].imag();
  }
  return (lane[0] - lane[1]) + (lane[2] - lane[3]);
}

void sum_sumsq(const double* x, std::size_t n, double* sum, double* sumsq) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double q[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t full = n - n % 4;
  for (std::size_t i = 0; i < full; i += 4) {
    for (int l = 0; l < 4; ++l) {
      s[l] = s[l] + x[i + l];
      q[l] = q[l] + x[i + l] * x[i + l];
    }
  }
  detail::finish_lanes(s, q, x + full, n - full, sum, sumsq);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &mat4_mul, &mat4_mul_adjoint, &mat4_trace_product,
                                 &sum_sumsq};
  return table;
}

}  // namespace blgi::simd
