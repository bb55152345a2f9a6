#pragma once

// Runtime-dispatched arithmetic kernels for 4x4 complex matrices and moment
// reductions. Every variant performs the same IEEE operations in the same
// order as the scalar reference, so results are bit-identical across ISAs
// (the build disables FMA contraction).

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace blgi::simd {

using Complex = std::complex<double>;

struct KernelTable {
  std::string_view name;
  /// out = a * b, all row-major 4x4. `out` must not alias `a` or `b`.
  void (*mat4_mul)(const Complex* a, const Complex* b, Complex* out);
  /// out = a * b^dagger. `out` must not alias `a` or `b`.
  void (*mat4_mul_adjoint)(const Complex* a, const Complex* b, Complex* out);
  /// Re Tr(a * b).
  double (*mat4_trace_product)(const Complex* a, const Complex* b);
  /// Sum and sum of squares of x[0..n), accumulated in four interleaved lanes.
  void (*sum_sumsq)(const double* x, std::size_t n, double* sum, double* sumsq);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in or the CPU lacks the extension.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// All variants usable on this host, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Best available table, overridable with BLGI_SIMD=scalar|avx2|neon.
const KernelTable& active_kernels();

}  // namespace blgi::simd
