#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace blgi::simd {

#if defined(BLGI_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(BLGI_HAVE_NEON)
const KernelTable& neon_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(BLGI_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(BLGI_HAVE_NEON)
  return &neon_table();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* k = avx2_kernels()) out.push_back(k);
  if (const auto* k = neon_kernels()) out.push_back(k);
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("BLGI_SIMD")) {
    for (const auto* k : available_kernels()) {
      if (k->name == std::string_view(forced)) return *k;
    }
  }
  const auto all = available_kernels();
  return *all.back();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace blgi::simd
