#pragma once

// Counter-based random streams. Every shot owns the stream keyed by
// (seed, shot index), so results do not depend on how shots are scheduled.

#include <array>
#include <cstdint>
#include <limits>

namespace blgi {

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// UniformRandomBitGenerator over the Philox stream for (seed, stream).
class ShotRng {
 public:
  using result_type = std::uint64_t;

  ShotRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace blgi

namespace blgi {

/// Independent 64-bit seed for sub-run `index` of a tagged family.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  ShotRng rng(seed ^ tag, index);
  return rng();
}

}  // namespace blgi
