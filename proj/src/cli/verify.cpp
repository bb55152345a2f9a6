#include "blgi/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "blgi/kernels.hpp"
#include "blgi/lhv.hpp"
#include "blgi/protocol.hpp"

namespace blgi::cli {

namespace {

constexpr double kPi = std::numbers::pi;

CheckResult check(std::string name, double deviation, double tolerance) {
  return CheckResult{std::move(name), deviation, tolerance, deviation <= tolerance};
}

// A mixed, entangled, complex-valued state: 0.8 |psi><psi| + 0.2 I/4.
TwoQubitState generic_state() {
  std::array<Complex, 4> psi{Complex(0.5, 0.1), Complex(-0.2, 0.4), Complex(0.3, -0.3),
                             Complex(0.6, 0.0)};
  double norm = 0.0;
  for (const auto& z : psi) norm += std::norm(z);
  for (auto& z : psi) z /= std::sqrt(norm);
  const Matrix4 pure = TwoQubitState::pure(psi).rho();
  return TwoQubitState::from_matrix(0.8 * pure + 0.05 * Matrix4::identity());
}

double reduced_diff(const SingleQubitOperator& a, const SingleQubitOperator& b) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a.m[i] - b.m[i]));
  return worst;
}

std::vector<ExperimentConfig> oracle_grid() {
  std::vector<ExperimentConfig> grid;
  for (double sigma : {0.5, 1.0, 2.0, 5.0}) {
    for (double eta : {0.5, 1.0}) {
      for (double v : {0.8, 1.0}) {
        ExperimentConfig c;
        c.meter1 = c.meter2 = GaussianMeterSpec{sigma, eta};
        c.b_spec.v = v;
        grid.push_back(c);
      }
    }
  }
  for (double vt : {0.3, 0.6, 0.9}) {
    for (double u : {0.8, 1.0}) {
      if (vt > u) continue;  // total visibility cannot exceed the readout visibility
      for (double v : {0.8, 1.0}) {
        ExperimentConfig c;
        c.meter1 = c.meter2 = AncillaMeterSpec{vt, u};
        c.b_spec.v = v;
        grid.push_back(c);
      }
    }
  }
  return grid;
}

}  // namespace

std::vector<CheckResult> run_verification() {
  std::vector<CheckResult> out;
  const AnalyzerBasis tilted = analyzer_basis(0.7);

  {
    // For Kraus operators diagonal in an orthonormal basis, sum K K^dagger = sum K^dagger K,
    // so completeness is the unread channel applied to the identity.
    double worst = 0.0;
    for (double sigma : {0.5, 1.0, 2.0, 5.0}) {
      const Matrix4 total = average_over_outcomes(Matrix4::identity(), Arm::one,
                                                  GaussianMeterSpec{sigma, 1.0}, tilted);
      worst = std::max(worst, total.max_abs_diff(Matrix4::identity()));
    }
    out.push_back(check("gaussian Kraus completeness (quadrature)", worst, 1e-8));
  }
  {
    double worst = 0.0;
    for (double v : {0.1, 0.3, 0.6, 0.9, 1.0}) {
      const auto plus = ancilla_kraus(Sign::plus, v, tilted);
      const auto minus = ancilla_kraus(Sign::minus, v, tilted);
      const auto total = plus.adjoint() * plus + minus.adjoint() * minus;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          worst = std::max(worst, std::abs(total(r, c) - (r == c ? 1.0 : 0.0)));
        }
      }
    }
    out.push_back(check("ancilla Kraus completeness", worst, 1e-15));
  }
  {
    const double t = violation_threshold();
    out.push_back(check("threshold identity analytic(t, t, 1) = 2",
                        std::abs(analytic_mean(t, t, 1.0) - 2.0), 1e-12));
  }
  {
    const TwoQubitState bell = bell_state();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double p1 = -kPi + 2.0 * kPi * i / 49.0;
      const double p2 = 0.37 * kPi - 1.3 * kPi * i / 49.0;
      const double e = expectation(bell, analyzer_basis(p1), analyzer_basis(p2));
      worst = std::max(worst, std::abs(e - std::cos(p1 - p2)));
    }
    out.push_back(check("Bell correlation cos(phi1 - phi2)", worst, 1e-10));
  }
  {
    double worst = 0.0;
    for (const auto& c : oracle_grid()) {
      const double closed = analytic_mean(dephasing_factor(c.meter1), dephasing_factor(c.meter2),
                                          c.b_spec.v);
      worst = std::max(worst, std::abs(exact_mean(c) - closed));
    }
    out.push_back(check("closed form vs joint distribution <C>", worst, 1e-6));
  }
  {
    const TwoQubitState rho = generic_state();
    const SingleQubitOperator before = rho.reduced(Arm::two);
    double worst = 0.0;
    for (const WeakMeterSpec& spec :
         {WeakMeterSpec{GaussianMeterSpec{0.7, 0.6}}, WeakMeterSpec{AncillaMeterSpec{0.6, 0.8}}}) {
      const Matrix4 after = average_over_outcomes(rho.rho(), Arm::one, spec, tilted);
      worst = std::max(worst, reduced_diff(trusted_state(after).reduced(Arm::two), before));
    }
    const Matrix4 projected =
        average_over_outcomes(rho.rho(), Arm::one, ProjectiveMeterSpec{0.9}, tilted);
    worst = std::max(worst, reduced_diff(trusted_state(projected).reduced(Arm::two), before));
    out.push_back(check("no-signaling to the other arm", worst, 1e-10));
  }
  {
    const TwoQubitState rho = generic_state();
    double worst = 0.0;
    for (const WeakMeterSpec& spec :
         {WeakMeterSpec{GaussianMeterSpec{0.8, 1.0}}, WeakMeterSpec{GaussianMeterSpec{3.0, 1.0}},
          WeakMeterSpec{AncillaMeterSpec{0.6, 1.0}}}) {
      for (Arm arm : {Arm::one, Arm::two}) {
        const Matrix4 averaged = average_over_outcomes(rho.rho(), arm, spec, tilted);
        const TwoQubitState channel = apply_dephasing(rho, arm, dephasing_factor(spec), tilted);
        worst = std::max(worst, averaged.max_abs_diff(channel.rho()));
      }
    }
    out.push_back(check("unread measurement equals dephasing channel", worst, 1e-8));
  }
  {
    double worst = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto r = brute_force_extremes(n);
      worst = std::max({worst, std::abs(r.max - 2.0), std::abs(r.min + 2.0)});
    }
    out.push_back(check("classical bound by enumeration (1-4 hidden states)", worst, 0.0));
  }
  {
    // Deterministic pseudo-random operands.
    ShotRng rng(2024, 0);
    auto fill = [&](Complex* m) {
      for (int i = 0; i < 16; ++i) m[i] = Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    };
    double mismatches = 0.0;
    const auto& ref = simd::scalar_kernels();
    for (const auto* k : simd::available_kernels()) {
      for (int trial = 0; trial < 200; ++trial) {
        Complex a[16], b[16], r1[16], r2[16];
        fill(a);
        fill(b);
        ref.mat4_mul(a, b, r1);
        k->mat4_mul(a, b, r2);
        mismatches += std::memcmp(r1, r2, sizeof r1) != 0;
        ref.mat4_mul_adjoint(a, b, r1);
        k->mat4_mul_adjoint(a, b, r2);
        mismatches += std::memcmp(r1, r2, sizeof r1) != 0;
        const double t1 = ref.mat4_trace_product(a, b);
        const double t2 = k->mat4_trace_product(a, b);
        mismatches += std::memcmp(&t1, &t2, sizeof t1) != 0;
      }
    }
    out.push_back(check("SIMD kernels bit-identical to scalar", mismatches, 0.0));
  }
  return out;
}

}  // namespace blgi::cli
