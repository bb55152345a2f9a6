#include "blgi/qmath.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "blgi/errors.hpp"
#include "blgi/kernels.hpp"

namespace blgi {

SingleQubitOperator SingleQubitOperator::identity() {
  SingleQubitOperator out;
  out(0, 0) = 1.0;
  out(1, 1) = 1.0;
  return out;
}

SingleQubitOperator SingleQubitOperator::outer(const QubitVector& ket) {
  SingleQubitOperator out;
  const Complex v[2] = {ket.amp0, ket.amp1};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out(r, c) = v[r] * std::conj(v[c]);
  }
  return out;
}

SingleQubitOperator SingleQubitOperator::diagonal_in(const AnalyzerBasis& basis, Complex d0,
                                                     Complex d1) {
  const auto p0 = outer(basis.ket0);
  const auto p1 = outer(basis.ket1);
  SingleQubitOperator out;
  for (int i = 0; i < 4; ++i) out.m[i] = d0 * p0.m[i] + d1 * p1.m[i];
  return out;
}

SingleQubitOperator SingleQubitOperator::adjoint() const {
  SingleQubitOperator out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out(r, c) = std::conj((*this)(c, r));
  }
  return out;
}

SingleQubitOperator operator*(const SingleQubitOperator& a, const SingleQubitOperator& b) {
  SingleQubitOperator out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c);
  }
  return out;
}

SingleQubitOperator operator+(const SingleQubitOperator& a, const SingleQubitOperator& b) {
  SingleQubitOperator out;
  for (int i = 0; i < 4; ++i) out.m[i] = a.m[i] + b.m[i];
  return out;
}

Matrix4 Matrix4::identity() {
  Matrix4 out;
  for (int i = 0; i < 4; ++i) out(i, i) = 1.0;
  return out;
}

Matrix4 Matrix4::adjoint() const {
  Matrix4 out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(r, c) = std::conj((*this)(c, r));
  }
  return out;
}

Complex Matrix4::trace() const { return m[0] + m[5] + m[10] + m[15]; }

double Matrix4::max_abs_diff(const Matrix4& other) const {
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) worst = std::max(worst, std::abs(m[i] - other.m[i]));
  return worst;
}

Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
  Matrix4 out;
  simd::active_kernels().mat4_mul(a.data(), b.data(), out.data());
  return out;
}

Matrix4 operator+(const Matrix4& a, const Matrix4& b) {
  Matrix4 out;
  for (int i = 0; i < 16; ++i) out.m[i] = a.m[i] + b.m[i];
  return out;
}

Matrix4 operator-(const Matrix4& a, const Matrix4& b) {
  Matrix4 out;
  for (int i = 0; i < 16; ++i) out.m[i] = a.m[i] - b.m[i];
  return out;
}

Matrix4 operator*(double s, const Matrix4& a) {
  Matrix4 out;
  for (int i = 0; i < 16; ++i) out.m[i] = s * a.m[i];
  return out;
}

namespace {

Eigen::Matrix4cd to_eigen(const Matrix4& a) {
  Eigen::Matrix4cd out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(r, c) = a(r, c);
  }
  return out;
}

}  // namespace

Matrix4 hermitian_part(const Matrix4& a) {
  Matrix4 out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
  }
  return out;
}

TwoQubitState TwoQubitState::from_matrix(const Matrix4& rho) {
  for (const auto& z : rho.m) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericalError("density matrix has non-finite entries");
    }
  }
  if (rho.max_abs_diff(rho.adjoint()) > kHermitianTol) {
    throw NumericalError("density matrix is not Hermitian");
  }
  const Complex tr = rho.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol) {
    throw NumericalError("density matrix trace " + std::to_string(tr.real()) + " is not 1");
  }
  const Matrix4 h = hermitian_part(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(to_eigen(h));
  const Eigen::Vector4d evals = solver.eigenvalues();
  if (evals.minCoeff() < -kPositivityTol) {
    throw NumericalError("density matrix has eigenvalue " + std::to_string(evals.minCoeff()));
  }
  if (evals.minCoeff() >= 0.0) return TwoQubitState(h);

  // Clip the roundoff-level negative eigenvalues and rebuild.
  const Eigen::Vector4d clipped = evals.cwiseMax(0.0);
  const Eigen::Matrix4cd vecs = solver.eigenvectors();
  const Eigen::Matrix4cd rebuilt = vecs * clipped.asDiagonal() * vecs.adjoint();
  Matrix4 out;
  const double scale = 1.0 / clipped.sum();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(r, c) = scale * rebuilt(r, c);
  }
  return TwoQubitState(hermitian_part(out));
}

TwoQubitState TwoQubitState::pure(const std::array<Complex, 4>& psi) {
  Matrix4 rho;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) rho(r, c) = psi[r] * std::conj(psi[c]);
  }
  return from_matrix(rho);
}

double TwoQubitState::purity() const { return trace_product(rho_, rho_); }

double TwoQubitState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(to_eigen(rho_),
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

SingleQubitOperator TwoQubitState::reduced(Arm arm) const {
  check_arm(arm);
  SingleQubitOperator out;
  // Index of |i j> is 2 i + j.
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      Complex acc = 0.0;
      for (int k = 0; k < 2; ++k) {
        acc += arm == Arm::one ? rho_(2 * r + k, 2 * c + k) : rho_(2 * k + r, 2 * k + c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

TwoQubitState trusted_state(const Matrix4& rho) { return TwoQubitState(hermitian_part(rho)); }

TwoQubitState bell_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return TwoQubitState::pure({s, 0.0, 0.0, s});
}

AnalyzerBasis analyzer_basis(double phi) {
  if (!std::isfinite(phi)) throw InvalidArgument("analyzer angle must be finite");
  const double c = std::cos(phi / 2.0);
  const double s = std::sin(phi / 2.0);
  return AnalyzerBasis{phi, QubitVector{c, s}, QubitVector{-s, c}};
}

void check_arm(Arm arm) {
  if (arm != Arm::one && arm != Arm::two) {
    throw InvalidArgument("arm must be 1 or 2, got " + std::to_string(static_cast<int>(arm)));
  }
}

Matrix4 embed(const SingleQubitOperator& op, Arm arm) {
  check_arm(arm);
  Matrix4 out;
  for (int i1 = 0; i1 < 2; ++i1) {
    for (int j1 = 0; j1 < 2; ++j1) {
      for (int i2 = 0; i2 < 2; ++i2) {
        for (int j2 = 0; j2 < 2; ++j2) {
          Complex v;
          if (arm == Arm::one) {
            v = i2 == j2 ? op(i1, j1) : Complex{};
          } else {
            v = i1 == j1 ? op(i2, j2) : Complex{};
          }
          out(2 * i1 + i2, 2 * j1 + j2) = v;
        }
      }
    }
  }
  return out;
}

Matrix4 sandwich(const Matrix4& kraus, const Matrix4& rho) {
  const auto& k = simd::active_kernels();
  Matrix4 tmp;
  Matrix4 out;
  k.mat4_mul(kraus.data(), rho.data(), tmp.data());
  k.mat4_mul_adjoint(tmp.data(), kraus.data(), out.data());
  return out;
}

double trace_product(const Matrix4& a, const Matrix4& b) {
  return simd::active_kernels().mat4_trace_product(a.data(), b.data());
}

Branch apply_operator(const TwoQubitState& state, const Matrix4& kraus) {
  const Matrix4 image = sandwich(kraus, state.rho());
  const double weight = image.trace().real();
  if (!(weight > 1e-15)) {
    throw ZeroProbabilityBranch("Kraus branch has probability " + std::to_string(weight));
  }
  return Branch{weight, trusted_state((1.0 / weight) * image)};
}

SingleQubitOperator observable(const AnalyzerBasis& basis) {
  return SingleQubitOperator::diagonal_in(basis, 1.0, -1.0);
}

double expectation(const TwoQubitState& state, const std::optional<AnalyzerBasis>& basis1,
                   const std::optional<AnalyzerBasis>& basis2) {
  if (!basis1 && !basis2) throw InvalidArgument("expectation needs at least one basis");
  Matrix4 op = Matrix4::identity();
  if (basis1) op = embed(observable(*basis1), Arm::one);
  if (basis2) op = op * embed(observable(*basis2), Arm::two);
  return trace_product(state.rho(), op);
}

}  // namespace blgi
