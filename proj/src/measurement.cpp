#include "blgi/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "blgi/errors.hpp"

namespace blgi {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InvalidArgument(what); }

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double population0(const TwoQubitState& state, const Matrix4& projector0) {
  return clamp01(trace_product(state.rho(), projector0));
}

// Symmetric misidentification of a +-1 outcome with visibility `vis`.
double report(double truth, double vis, ShotRng& rng) {
  if (vis >= 1.0) return truth;
  return rng.bernoulli(0.5 * (1.0 - vis)) ? -truth : truth;
}

}  // namespace

void GaussianMeterSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) bad("sigma must be a positive finite number");
  if (!(eta > 0.0 && eta <= 1.0)) bad("eta must lie in (0, 1]");
}

void AncillaMeterSpec::validate() const {
  if (!(v_total > 0.0 && v_total <= 1.0)) bad("v_total must lie in (0, 1]");
  if (!(u > 0.0 && u <= 1.0)) bad("u must lie in (0, 1]");
  if (v_total > u) bad("v_total must not exceed u");
}

void ProjectiveMeterSpec::validate() const {
  if (!(v >= 0.0 && v <= 1.0)) bad("v must lie in [0, 1]");
}

void validate(const WeakMeterSpec& spec) {
  std::visit([](const auto& s) { s.validate(); }, spec);
}

SingleQubitOperator gaussian_kraus(double alpha, double sigma, const AnalyzerBasis& basis) {
  if (!(sigma > 0.0)) bad("sigma must be positive");
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  const double s4 = 4.0 * sigma * sigma;
  const double d0 = norm * std::exp(-(alpha - 1.0) * (alpha - 1.0) / s4);
  const double d1 = norm * std::exp(-(alpha + 1.0) * (alpha + 1.0) / s4);
  return SingleQubitOperator::diagonal_in(basis, d0, d1);
}

SingleQubitOperator ancilla_kraus(Sign sign, double v_ent, const AnalyzerBasis& basis) {
  if (!(v_ent > 0.0 && v_ent <= 1.0)) bad("ancilla visibility must lie in (0, 1]");
  const double s = static_cast<double>(static_cast<int>(sign));
  const double d0 = std::sqrt(std::max(0.0, 0.5 + 0.5 * s * v_ent));
  const double d1 = std::sqrt(std::max(0.0, 0.5 - 0.5 * s * v_ent));
  return SingleQubitOperator::diagonal_in(basis, d0, d1);
}

SingleQubitOperator basis_projector(Sign sign, const AnalyzerBasis& basis) {
  return SingleQubitOperator::outer(sign == Sign::plus ? basis.ket0 : basis.ket1);
}

MeterOutcome sample_gaussian(const TwoQubitState& state, Arm arm, const GaussianMeterSpec& spec,
                             const AnalyzerBasis& basis, ShotRng& rng) {
  spec.validate();
  const Matrix4 projector0 = embed(basis_projector(Sign::plus, basis), arm);
  const double p0 = population0(state, projector0);

  // Exact signal marginal: p0 N(+1, sigma^2) + p1 N(-1, sigma^2).
  const double center = rng.bernoulli(p0) ? 1.0 : -1.0;
  std::normal_distribution<double> noise(0.0, 1.0);
  const double alpha = center + spec.sigma * noise(rng);

  // Kraus operator rescaled so its larger entry is 1; the update is
  // renormalized anyway and this keeps far-tail signals representable.
  const double s4 = 4.0 * spec.sigma * spec.sigma;
  const double l0 = -(alpha - 1.0) * (alpha - 1.0) / s4;
  const double l1 = -(alpha + 1.0) * (alpha + 1.0) / s4;
  const double top = std::max(l0, l1);
  const Matrix4 kraus =
      embed(SingleQubitOperator::diagonal_in(basis, std::exp(l0 - top), std::exp(l1 - top)), arm);
  Branch branch = apply_operator(state, kraus);

  const double excess = inefficiency_dephasing(spec);
  TwoQubitState post = branch.state;
  if (excess < 1.0) post = trusted_state(dephase_matrix(post.rho(), projector0, excess));

  const double var2 = 2.0 * spec.sigma * spec.sigma;
  const double gauss_norm = 1.0 / std::sqrt(std::numbers::pi * var2);
  const double density =
      gauss_norm * (p0 * std::exp(-(alpha - 1.0) * (alpha - 1.0) / var2) +
                    (1.0 - p0) * std::exp(-(alpha + 1.0) * (alpha + 1.0) / var2));
  return MeterOutcome{alpha, std::move(post), density};
}

MeterOutcome sample_ancilla(const TwoQubitState& state, Arm arm, const AncillaMeterSpec& spec,
                            const AnalyzerBasis& basis, ShotRng& rng) {
  spec.validate();
  const double v_ent = spec.entangling_visibility();
  const Matrix4 projector0 = embed(basis_projector(Sign::plus, basis), arm);
  const double p0 = population0(state, projector0);
  const double p_plus = clamp01(0.5 * (1.0 + v_ent) * p0 + 0.5 * (1.0 - v_ent) * (1.0 - p0));

  Sign sign = rng.bernoulli(p_plus) ? Sign::plus : Sign::minus;
  auto branch_for = [&](Sign s) { return embed(ancilla_kraus(s, v_ent, basis), arm); };
  double weight = 0.0;
  std::optional<TwoQubitState> post;
  try {
    Branch b = apply_operator(state, branch_for(sign));
    weight = b.weight;
    post = std::move(b.state);
  } catch (const ZeroProbabilityBranch&) {
    // Roundoff picked an impossible branch; the other one has probability 1.
    sign = sign == Sign::plus ? Sign::minus : Sign::plus;
    Branch b = apply_operator(state, branch_for(sign));
    weight = b.weight;
    post = std::move(b.state);
  }

  const double truth = static_cast<double>(static_cast<int>(sign));
  const double reported = report(truth, spec.u, rng);
  return MeterOutcome{reported / spec.v_total, std::move(*post), weight};
}

MeterOutcome sample_weak(const TwoQubitState& state, Arm arm, const WeakMeterSpec& spec,
                         const AnalyzerBasis& basis, ShotRng& rng) {
  if (const auto* g = std::get_if<GaussianMeterSpec>(&spec)) {
    return sample_gaussian(state, arm, *g, basis, rng);
  }
  return sample_ancilla(state, arm, std::get<AncillaMeterSpec>(spec), basis, rng);
}

MeterOutcome projective_sample(const TwoQubitState& state, Arm arm,
                               const ProjectiveMeterSpec& spec, const AnalyzerBasis& basis,
                               ShotRng& rng) {
  spec.validate();
  const Matrix4 projector0 = embed(basis_projector(Sign::plus, basis), arm);
  const double p0 = population0(state, projector0);
  Sign sign = rng.bernoulli(p0) ? Sign::plus : Sign::minus;
  auto projector = [&](Sign s) {
    return s == Sign::plus ? projector0 : embed(basis_projector(Sign::minus, basis), arm);
  };
  std::optional<Branch> branch;
  try {
    branch = apply_operator(state, projector(sign));
  } catch (const ZeroProbabilityBranch&) {
    sign = sign == Sign::plus ? Sign::minus : Sign::plus;
    branch = apply_operator(state, projector(sign));
  }
  const double truth = static_cast<double>(static_cast<int>(sign));
  return MeterOutcome{report(truth, spec.v, rng), std::move(branch->state), branch->weight};
}

double dephasing_factor(const GaussianMeterSpec& spec) {
  spec.validate();
  return std::exp(-1.0 / (2.0 * spec.sigma * spec.sigma * spec.eta));
}

double dephasing_factor(const AncillaMeterSpec& spec) {
  spec.validate();
  const double r = spec.entangling_visibility();
  return std::sqrt(std::max(0.0, 1.0 - r * r));
}

double dephasing_factor(const WeakMeterSpec& spec) {
  return std::visit([](const auto& s) { return dephasing_factor(s); }, spec);
}

double inefficiency_dephasing(const GaussianMeterSpec& spec) {
  spec.validate();
  return std::exp(-(1.0 / (2.0 * spec.sigma * spec.sigma)) * (1.0 / spec.eta - 1.0));
}

Matrix4 dephase_matrix(const Matrix4& rho, const Matrix4& projector0, double factor) {
  // P0 rho P0 + P1 rho P1 = rho - P0 rho - rho P0 + 2 P0 rho P0, and
  // rho P0 = (P0 rho)^dagger for Hermitian rho.
  const Matrix4 p_rho = projector0 * rho;
  const Matrix4 p_rho_p = p_rho * projector0;
  const Matrix4 rho_p = p_rho.adjoint();
  Matrix4 out;
  for (int i = 0; i < 16; ++i) {
    const Complex block_diag = rho.m[i] - p_rho.m[i] - rho_p.m[i] + 2.0 * p_rho_p.m[i];
    out.m[i] = factor * rho.m[i] + (1.0 - factor) * block_diag;
  }
  return out;
}

TwoQubitState apply_dephasing(const TwoQubitState& state, Arm arm, double factor,
                              const AnalyzerBasis& basis) {
  if (!(factor >= 0.0 && factor <= 1.0)) bad("dephasing factor must lie in [0, 1]");
  const Matrix4 projector0 = embed(basis_projector(Sign::plus, basis), arm);
  return trusted_state(dephase_matrix(state.rho(), projector0, factor));
}

}  // namespace blgi

#include "blgi/quadrature.hpp"

namespace blgi {

Matrix4 average_over_outcomes(const Matrix4& rho, Arm arm, const WeakMeterSpec& spec,
                              const AnalyzerBasis& basis, std::size_t quadrature_order) {
  validate(spec);
  const Matrix4 projector0 = embed(basis_projector(Sign::plus, basis), arm);
  Matrix4 out;
  if (const auto* g = std::get_if<GaussianMeterSpec>(&spec)) {
    const auto& rule = gauss_hermite(quadrature_order);
    const double scale = std::numbers::sqrt2 * g->sigma;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (!(rule.weights[i] > 0.0)) continue;
      const double x = rule.nodes[i];
      // int f(alpha) d alpha = sqrt(2) sigma sum_i w_i exp(x_i^2) f(sqrt(2) sigma x_i)
      const double jacobian = scale * std::exp(std::log(rule.weights[i]) + x * x);
      const Matrix4 kraus = embed(gaussian_kraus(scale * x, g->sigma, basis), arm);
      out = out + jacobian * sandwich(kraus, rho);
    }
    const double excess = inefficiency_dephasing(*g);
    if (excess < 1.0) out = dephase_matrix(out, projector0, excess);
    return out;
  }
  const auto& a = std::get<AncillaMeterSpec>(spec);
  for (Sign s : {Sign::plus, Sign::minus}) {
    out = out + sandwich(embed(ancilla_kraus(s, a.entangling_visibility(), basis), arm), rho);
  }
  return out;
}

Matrix4 average_over_outcomes(const Matrix4& rho, Arm arm, const ProjectiveMeterSpec& spec,
                              const AnalyzerBasis& basis) {
  spec.validate();
  Matrix4 out;
  for (Sign s : {Sign::plus, Sign::minus}) {
    out = out + sandwich(embed(basis_projector(s, basis), arm), rho);
  }
  return out;
}

}  // namespace blgi
