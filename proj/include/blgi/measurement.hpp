#pragma once

// Weak (Gaussian or ancilla) and projective qubit meters acting on one arm
// of the pair, with per-shot sampling and the matching dephasing channels.

#include <variant>

#include "blgi/qmath.hpp"
#include "blgi/rng.hpp"

namespace blgi {

/// Quantum-limited Gaussian meter with signal spread sigma, followed by
/// excess dephasing for efficiency eta < 1.
struct GaussianMeterSpec {
  double sigma = 1.0;
  double eta = 1.0;

  void validate() const;
};

/// Indirect measurement through an ancilla qubit. `v_total` is the overall
/// signal visibility, `u` the ancilla readout visibility, v_total <= u.
struct AncillaMeterSpec {
  double v_total = 1.0;
  double u = 1.0;

  void validate() const;
  /// Strength of the entangling interaction, v_total / u.
  double entangling_visibility() const { return v_total / u; }
};

struct ProjectiveMeterSpec {
  double v = 1.0;

  void validate() const;
};

using WeakMeterSpec = std::variant<GaussianMeterSpec, AncillaMeterSpec>;

void validate(const WeakMeterSpec& spec);

enum class Sign : int { plus = 1, minus = -1 };

struct MeterOutcome {
  /// Recorded signal (alpha_k or b_k).
  double signal;
  TwoQubitState post_state;
  /// Probability of the realized Kraus branch; for the Gaussian meter this is
  /// the probability density of the recorded signal.
  double branch_weight;
};

/// (2 pi sigma^2)^(-1/4) [exp(-(alpha-1)^2 / 4sigma^2) |0><0| + exp(-(alpha+1)^2 / 4sigma^2) |1><1|]
/// in the analyzer basis.
SingleQubitOperator gaussian_kraus(double alpha, double sigma, const AnalyzerBasis& basis);

/// sqrt(1/2 +- v/2) |0><0| + sqrt(1/2 -+ v/2) |1><1| in the analyzer basis.
SingleQubitOperator ancilla_kraus(Sign sign, double v_ent, const AnalyzerBasis& basis);

/// Projector onto ket0 (plus) or ket1 (minus).
SingleQubitOperator basis_projector(Sign sign, const AnalyzerBasis& basis);

MeterOutcome sample_gaussian(const TwoQubitState& state, Arm arm, const GaussianMeterSpec& spec,
                             const AnalyzerBasis& basis, ShotRng& rng);

MeterOutcome sample_ancilla(const TwoQubitState& state, Arm arm, const AncillaMeterSpec& spec,
                            const AnalyzerBasis& basis, ShotRng& rng);

MeterOutcome sample_weak(const TwoQubitState& state, Arm arm, const WeakMeterSpec& spec,
                         const AnalyzerBasis& basis, ShotRng& rng);

MeterOutcome projective_sample(const TwoQubitState& state, Arm arm,
                               const ProjectiveMeterSpec& spec, const AnalyzerBasis& basis,
                               ShotRng& rng);

/// Ensemble coherence damping: exp(-1/(2 sigma^2 eta)) for the Gaussian meter,
/// sqrt(1 - (v_total/u)^2) for the ancilla meter.
double dephasing_factor(const GaussianMeterSpec& spec);
double dephasing_factor(const AncillaMeterSpec& spec);
double dephasing_factor(const WeakMeterSpec& spec);

/// Excess damping that efficiency eta adds on top of the quantum-limited
/// Gaussian back-action.
double inefficiency_dephasing(const GaussianMeterSpec& spec);

/// Multiplies the arm's coherences in `basis` by `factor`.
TwoQubitState apply_dephasing(const TwoQubitState& state, Arm arm, double factor,
                              const AnalyzerBasis& basis);

/// Same channel on an unnormalized operator, with a precomputed embedded
/// projector onto ket0.
Matrix4 dephase_matrix(const Matrix4& rho, const Matrix4& projector0, double factor);

}  // namespace blgi

namespace blgi {

inline constexpr std::size_t kChannelQuadratureOrder = 200;

/// Outcome-averaged (unread) state update of a weak meter: Gauss-Hermite
/// quadrature over the Gaussian Kraus family, exact sum for the ancilla.
Matrix4 average_over_outcomes(const Matrix4& rho, Arm arm, const WeakMeterSpec& spec,
                              const AnalyzerBasis& basis,
                              std::size_t quadrature_order = kChannelQuadratureOrder);

/// Outcome-averaged projective measurement (visibility does not affect the state).
Matrix4 average_over_outcomes(const Matrix4& rho, Arm arm, const ProjectiveMeterSpec& spec,
                              const AnalyzerBasis& basis);

}  // namespace blgi
