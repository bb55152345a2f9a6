#pragma once

// The hybrid Bell / Leggett-Garg protocol: a Bell pair, a weak measurement of
// A_k on each arm followed by a projective measurement of B_k, and the
// correlator C = a1 a2 + a1 b2 + b1 a2 - b1 b2 averaged over one fixed
// analyzer configuration.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "blgi/measurement.hpp"
#include "blgi/rng.hpp"

namespace blgi {

struct MeasurementRecord {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

/// Analyzer angles in radians. Defaults are the CHSH-optimal settings.
struct AnalyzerAngles {
  double a1 = std::numbers::pi / 2.0;
  double a2 = std::numbers::pi / 4.0;
  double b1 = 0.0;
  double b2 = 3.0 * std::numbers::pi / 4.0;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

struct ExperimentConfig {
  WeakMeterSpec meter1 = GaussianMeterSpec{};
  WeakMeterSpec meter2 = GaussianMeterSpec{};
  ProjectiveMeterSpec b_spec;
  AnalyzerAngles angles;
  std::uint64_t shots = 100000;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
};

struct Estimate {
  double mean = 0.0;
  /// Sample standard deviation / sqrt(shots).
  double standard_error = 0.0;
  std::uint64_t shots = 0;
};

/// Monte-Carlo result with the four correlator terms averaged over the same
/// set of shots: <a1 a2>, <a1 b2>, <b1 a2>, <b1 b2>.
struct MonteCarloSummary {
  Estimate correlator;
  std::array<double, 4> term_means{};
};

struct RunOptions {
  /// Worker threads; 0 picks the hardware concurrency. Never affects results.
  unsigned threads = 0;
};

/// C = a1 a2 + a1 b2 + b1 a2 - b1 b2
inline double correlator(const MeasurementRecord& r) {
  return r.alpha1 * r.alpha2 + r.alpha1 * r.b2 + r.b1 * r.alpha2 - r.b1 * r.b2;
}

/// One shot: Bell pair, A1 on arm 1, A2 on arm 2, then B1 and B2.
MeasurementRecord run_shot(const ExperimentConfig& config, ShotRng& rng);

/// Shot `index` of the run keyed by config.seed.
MeasurementRecord run_shot(const ExperimentConfig& config, std::uint64_t index);

MonteCarloSummary monte_carlo_summary(const ExperimentConfig& config, RunOptions options = {});
Estimate monte_carlo(const ExperimentConfig& config, RunOptions options = {});

/// Calls `sink` with records [first, first + count) in index order.
void for_each_record(const ExperimentConfig& config, std::uint64_t first, std::uint64_t count,
                     const std::function<void(std::uint64_t, const MeasurementRecord&)>& sink);

/// (1 + v xi1)(1 + v xi2) / sqrt(2)
double analytic_mean(double xi1, double xi2, double v);

/// Closed-form <C> for a configuration with the default CHSH angles.
double analytic_mean(const ExperimentConfig& config);

/// 2^(3/4) - 1: effective dephasing above which <C> exceeds 2.
double violation_threshold();

/// Deterministic <C> from the joint outcome distribution: Gauss-Hermite
/// quadrature over the Gaussian signals, exact sums over discrete outcomes.
struct ExactResult {
  double mean = 0.0;
  double second_moment = 0.0;
  /// <a1 a2>, <a1 b2>, <b1 a2>, <b1 b2>
  std::array<double, 4> terms{};
  /// Total probability of the enumerated outcomes.
  double total_probability = 0.0;
  /// Quadrature points per axis used for the final result (0 if none needed).
  std::size_t order = 0;

  double variance() const { return second_moment - mean * mean; }
};

inline constexpr std::size_t kMinQuadratureOrder = 200;
inline constexpr std::size_t kMaxQuadratureOrder = 4096;
inline constexpr double kQuadratureTolerance = 1e-8;

/// Throws NumericalError when successive quadrature orders disagree past the cap.
ExactResult exact_moments(const ExperimentConfig& config);

/// Same distribution at one fixed quadrature order.
ExactResult exact_moments_at_order(const ExperimentConfig& config, std::size_t order);

double exact_mean(const ExperimentConfig& config);

enum class SweepAxis { sigma, eta, v, v_total, u };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

/// Template with `axis` set to `value` on both arms.
ExperimentConfig with_axis_value(const ExperimentConfig& config, SweepAxis axis, double value);

struct SweepRow {
  double value = 0.0;
  Estimate mc;
  double exact = 0.0;
  double analytic = 0.0;
};

struct SweepOptions {
  RunOptions run;
  bool monte_carlo = true;
};

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis,
                            const std::vector<double>& values, SweepOptions options = {});

}  // namespace blgi
