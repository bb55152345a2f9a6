#pragma once

// Local macrorealistic (hidden-variable) models of the protocol: a hidden
// state zeta shared by both arms, calibrated noisy detectors for A_k, and
// +-1 signals for B_k whose mean may be disturbed locally by the A_k
// measurement.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "blgi/protocol.hpp"
#include "blgi/rng.hpp"

namespace blgi {

enum class NoiseKind {
  /// alpha = A(zeta) exactly.
  none,
  /// alpha ~ N(A(zeta), scale^2).
  gaussian,
  /// alpha = +-scale with mean A(zeta); requires scale >= 1.
  two_point,
};

/// Detector noise for one alpha detector at one hidden state. A nonzero
/// `bias` shifts every signal and breaks calibration on purpose.
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double scale = 0.0;
  double bias = 0.0;
};

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

struct LhvStrategy {
  std::vector<double> prep;
  std::vector<double> a1, a2, b1, b2;
  /// Per hidden state, per arm.
  std::vector<NoiseModel> noise1, noise2;
  /// Local invasiveness: B_k's mean is shifted by kappa_k (alpha_k - A_k(zeta)),
  /// then clamped to [-1, 1].
  double invasiveness1 = 0.0;
  double invasiveness2 = 0.0;

  std::size_t num_hidden_states() const { return prep.size(); }

  /// Shape, probability and range checks; noise calibration is not required.
  void validate_structure() const;
  /// Full invariants: structure plus every noise model averaging to its property.
  void validate() const;
};

MeasurementRecord lhv_shot(const LhvStrategy& strategy, ShotRng& rng);

/// Shots use streams [0, shots) of `seed`.
Estimate lhv_mean(const LhvStrategy& strategy, std::uint64_t shots, std::uint64_t seed);

struct BruteForceResult {
  double max = 0.0;
  double min = 0.0;
  std::uint64_t strategies = 0;
};

inline constexpr std::size_t kMaxBruteForceHiddenStates = 8;

/// Enumerates every deterministic +-1 assignment of (A1, A2, B1, B2) per hidden
/// state under a uniform preparation and returns the extreme exact <C>.
BruteForceResult brute_force_extremes(std::size_t num_hidden_states);
double brute_force_max(std::size_t num_hidden_states);

struct CalibrationEntry {
  std::size_t hidden_state;
  int arm;
  double declared;
  double empirical_mean;
  double empirical_stderr;
  bool pass;
};

struct CalibrationReport {
  std::vector<CalibrationEntry> entries;
  bool all_pass() const;
};

inline constexpr std::uint64_t kMinCalibrationShots = 10000;

/// Samples each alpha detector `shots` times per hidden state and flags any
/// whose mean misses the declared property by 5 standard errors or more.
CalibrationReport calibration_check(const LhvStrategy& strategy, std::uint64_t shots,
                                    std::uint64_t seed);

struct RandomStrategyOptions {
  std::size_t num_hidden_states = 4;
  NoiseKind noise = NoiseKind::gaussian;
  double noise_scale = 1.0;
  /// Invasiveness drawn uniformly from [-max, max] per arm.
  double max_invasiveness = 0.5;
};

/// Flat-simplex preparation, properties uniform on [-1, 1], calibrated noise.
LhvStrategy random_strategy(ShotRng& rng, const RandomStrategyOptions& options);

}  // namespace blgi
