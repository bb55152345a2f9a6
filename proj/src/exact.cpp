#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "blgi/errors.hpp"
#include "blgi/protocol.hpp"
#include "blgi/quadrature.hpp"

namespace blgi {

namespace {

// One outcome of a weak meter: its signal and the Kraus operator carrying the
// outcome's probability weight.
struct Atom {
  double signal;
  Matrix4 kraus;
};

struct WeakOutcomes {
  std::vector<Atom> atoms;
  double excess_dephasing = 1.0;
  Matrix4 projector0;
};

WeakOutcomes gaussian_outcomes(const GaussianMeterSpec& spec, const AnalyzerBasis& basis, Arm arm,
                               std::size_t order) {
  WeakOutcomes out;
  const auto& rule = gauss_hermite(order);
  const double s4 = 4.0 * spec.sigma * spec.sigma;
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  // M_alpha = sqrt(N(alpha; 0, sigma^2)) diag(exp((2a-1)/4s^2), exp((-2a-1)/4s^2)),
  // and N(alpha; 0, sigma^2) d alpha = exp(-x^2) dx / sqrt(pi) with alpha = sqrt(2) sigma x.
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    if (!(rule.weights[i] > 0.0)) continue;
    const double alpha = std::numbers::sqrt2 * spec.sigma * rule.nodes[i];
    const double half_log_w = 0.5 * (std::log(rule.weights[i]) - log_sqrt_pi);
    const double d0 = std::exp(half_log_w + (2.0 * alpha - 1.0) / s4);
    const double d1 = std::exp(half_log_w + (-2.0 * alpha - 1.0) / s4);
    out.atoms.push_back({alpha, embed(SingleQubitOperator::diagonal_in(basis, d0, d1), arm)});
  }
  out.excess_dephasing = inefficiency_dephasing(spec);
  out.projector0 = embed(basis_projector(Sign::plus, basis), arm);
  return out;
}

WeakOutcomes ancilla_outcomes(const AncillaMeterSpec& spec, const AnalyzerBasis& basis, Arm arm) {
  WeakOutcomes out;
  const double v_ent = spec.entangling_visibility();
  for (Sign branch : {Sign::plus, Sign::minus}) {
    const SingleQubitOperator m = ancilla_kraus(branch, v_ent, basis);
    for (Sign reported : {Sign::plus, Sign::minus}) {
      const double q = reported == branch ? 0.5 * (1.0 + spec.u) : 0.5 * (1.0 - spec.u);
      if (q <= 0.0) continue;
      const double root = std::sqrt(q);
      SingleQubitOperator scaled = m;
      for (auto& z : scaled.m) z *= root;
      out.atoms.push_back(
          {static_cast<double>(static_cast<int>(reported)) / spec.v_total, embed(scaled, arm)});
    }
  }
  out.projector0 = embed(basis_projector(Sign::plus, basis), arm);
  return out;
}

WeakOutcomes weak_outcomes(const WeakMeterSpec& spec, const AnalyzerBasis& basis, Arm arm,
                           std::size_t order) {
  if (const auto* g = std::get_if<GaussianMeterSpec>(&spec)) {
    return gaussian_outcomes(*g, basis, arm, order);
  }
  return ancilla_outcomes(std::get<AncillaMeterSpec>(spec), basis, arm);
}

// Signal-moment matrices sum_i alpha_i^p K_i rho K_i^dagger for p = 0, 1, 2,
// followed by the meter's excess dephasing (a linear channel).
std::array<Matrix4, 3> moment_images(const WeakOutcomes& meter, const Matrix4& rho) {
  std::array<Matrix4, 3> out{};
  for (const Atom& atom : meter.atoms) {
    const Matrix4 image = sandwich(atom.kraus, rho);
    out[0] = out[0] + image;
    out[1] = out[1] + atom.signal * image;
    out[2] = out[2] + (atom.signal * atom.signal) * image;
  }
  if (meter.excess_dephasing < 1.0) {
    for (auto& m : out) m = dephase_matrix(m, meter.projector0, meter.excess_dephasing);
  }
  return out;
}

bool is_gaussian(const WeakMeterSpec& spec) {
  return std::holds_alternative<GaussianMeterSpec>(spec);
}

}  // namespace

ExactResult exact_moments_at_order(const ExperimentConfig& config, std::size_t order) {
  config.validate();
  const AnalyzerBasis basis_a1 = analyzer_basis(config.angles.a1);
  const AnalyzerBasis basis_a2 = analyzer_basis(config.angles.a2);
  const AnalyzerBasis basis_b1 = analyzer_basis(config.angles.b1);
  const AnalyzerBasis basis_b2 = analyzer_basis(config.angles.b2);

  const WeakOutcomes meter1 = weak_outcomes(config.meter1, basis_a1, Arm::one, order);
  const WeakOutcomes meter2 = weak_outcomes(config.meter2, basis_a2, Arm::two, order);

  // joint[p][q] = sum over (alpha1, alpha2) of alpha1^p alpha2^q times the
  // unnormalized post-A state.
  const std::array<Matrix4, 3> first = moment_images(meter1, bell_state().rho());
  std::array<std::array<Matrix4, 3>, 3> joint{};
  for (int p = 0; p < 3; ++p) joint[p] = moment_images(meter2, first[p]);

  ExactResult result;
  result.order = is_gaussian(config.meter1) || is_gaussian(config.meter2) ? order : 0;
  const double v = config.b_spec.v;
  for (Sign t1 : {Sign::plus, Sign::minus}) {
    for (Sign t2 : {Sign::plus, Sign::minus}) {
      const Matrix4 projector =
          embed(basis_projector(t1, basis_b1), Arm::one) * embed(basis_projector(t2, basis_b2), Arm::two);
      double m[3][3];
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) m[p][q] = trace_product(projector, joint[p][q]);
      }
      const double truth1 = static_cast<int>(t1);
      const double truth2 = static_cast<int>(t2);
      for (double flip1 : {1.0, -1.0}) {
        const double q1 = 0.5 * (1.0 + flip1 * v);
        if (q1 <= 0.0) continue;
        for (double flip2 : {1.0, -1.0}) {
          const double q2 = 0.5 * (1.0 + flip2 * v);
          if (q2 <= 0.0) continue;
          const double r1 = flip1 * truth1;
          const double r2 = flip2 * truth2;
          double w[3][3];
          for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) w[p][q] = q1 * q2 * m[p][q];
          }
          // C = (a1 + r1)(a2 + r2) - 2 r1 r2, expanded in signal moments.
          const double lin1[3] = {r1, 1.0, 0.0};
          const double lin2[3] = {r2, 1.0, 0.0};
          const double sq1[3] = {1.0, 2.0 * r1, 1.0};
          const double sq2[3] = {1.0, 2.0 * r2, 1.0};
          double prod = 0.0;
          double prod_sq = 0.0;
          for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) {
              prod += lin1[p] * lin2[q] * w[p][q];
              prod_sq += sq1[p] * sq2[q] * w[p][q];
            }
          }
          result.mean += prod - 2.0 * r1 * r2 * w[0][0];
          result.second_moment += prod_sq - 4.0 * r1 * r2 * prod + 4.0 * w[0][0];
          result.terms[0] += w[1][1];
          result.terms[1] += r2 * w[1][0];
          result.terms[2] += r1 * w[0][1];
          result.terms[3] += r1 * r2 * w[0][0];
          result.total_probability += w[0][0];
        }
      }
    }
  }
  return result;
}

ExactResult exact_moments(const ExperimentConfig& config) {
  if (!is_gaussian(config.meter1) && !is_gaussian(config.meter2)) {
    return exact_moments_at_order(config, 0);
  }
  ExactResult previous = exact_moments_at_order(config, kMinQuadratureOrder);
  for (std::size_t order = 2 * kMinQuadratureOrder; order <= kMaxQuadratureOrder; order *= 2) {
    ExactResult current = exact_moments_at_order(config, order);
    if (std::abs(current.mean - previous.mean) <= kQuadratureTolerance &&
        std::abs(current.total_probability - 1.0) <= kQuadratureTolerance &&
        std::abs(previous.total_probability - 1.0) <= kQuadratureTolerance) {
      return current;
    }
    previous = current;
  }
  throw NumericalError("Gauss-Hermite quadrature did not converge within " +
                       std::to_string(kMaxQuadratureOrder) + " points per axis");
}

double exact_mean(const ExperimentConfig& config) { return exact_moments(config).mean; }

}  // namespace blgi
