#pragma once

#include "blgi/kernels.hpp"

namespace blgi::simd::detail {

// Shared by every variant so that the operand prepared for the vector loop
// is formed with identical (exact) operations.
inline void adjoint4(const Complex* b, Complex* out) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out[4 * r + c] = std::conj(b[4 * c + r]);
    }
  }
}

inline void transpose4(const Complex* b, Complex* out) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out[4 * r + c] = b[4 * c + r];
    }
  }
}

// Finish a four-lane moment reduction: tail elements go to lane (i mod 4),
// then lanes are combined as (l0 + l1) + (l2 + l3).
inline void finish_lanes(double* s, double* q, const double* tail, std::size_t tail_n,
                         double* sum, double* sumsq) {
  for (std::size_t i = 0; i < tail_n; ++i) {
    s[i] = s[i] + tail[i];
    q[i] = q[i] + tail[i] * tail[i];
  }
  *sum = (s[0] + s[1]) + (s[2] + s[3]);
  *sumsq = (q[0] + q[1]) + (q[2] + q[3]);
}

}  // namespace blgi::simd::detail
