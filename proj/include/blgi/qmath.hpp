#pragma once

// Exact complex linear algebra for one and two qubits.
//
// Two-qubit operators use the fixed basis ordering |00>, |01>, |10>, |11>
// with arm 1 as the left tensor factor.

#include <array>
#include <complex>
#include <optional>

namespace blgi {

using Complex = std::complex<double>;

/// Which member of the pair an operator acts on.
enum class Arm : int { one = 1, two = 2 };

struct QubitVector {
  Complex amp0;
  Complex amp1;

  double norm_squared() const { return std::norm(amp0) + std::norm(amp1); }
};

/// Analyzer axis at angle phi: ket0 = cos(phi/2)|0> + sin(phi/2)|1>,
/// ket1 = -sin(phi/2)|0> + cos(phi/2)|1>.
struct AnalyzerBasis {
  double phi = 0.0;
  QubitVector ket0;
  QubitVector ket1;
};

/// Row-major 2x2 complex operator.
struct SingleQubitOperator {
  std::array<Complex, 4> m{};

  Complex& operator()(int r, int c) { return m[2 * r + c]; }
  const Complex& operator()(int r, int c) const { return m[2 * r + c]; }

  static SingleQubitOperator identity();
  /// |ket><ket|
  static SingleQubitOperator outer(const QubitVector& ket);
  /// d0 |ket0><ket0| + d1 |ket1><ket1| in the analyzer basis.
  static SingleQubitOperator diagonal_in(const AnalyzerBasis& basis, Complex d0, Complex d1);

  SingleQubitOperator adjoint() const;
  friend SingleQubitOperator operator*(const SingleQubitOperator& a, const SingleQubitOperator& b);
  friend SingleQubitOperator operator+(const SingleQubitOperator& a, const SingleQubitOperator& b);
};

/// Row-major 4x4 complex matrix, aligned for the vector kernels.
struct Matrix4 {
  alignas(32) std::array<Complex, 16> m{};

  Complex& operator()(int r, int c) { return m[4 * r + c]; }
  const Complex& operator()(int r, int c) const { return m[4 * r + c]; }
  const Complex* data() const { return m.data(); }
  Complex* data() { return m.data(); }

  static Matrix4 identity();
  Matrix4 adjoint() const;
  Complex trace() const;
  double max_abs_diff(const Matrix4& other) const;

  friend Matrix4 operator*(const Matrix4& a, const Matrix4& b);
  friend Matrix4 operator+(const Matrix4& a, const Matrix4& b);
  friend Matrix4 operator-(const Matrix4& a, const Matrix4& b);
  friend Matrix4 operator*(double s, const Matrix4& a);
};

/// Density matrix of the pair. Hermitian, unit trace, positive semidefinite.
class TwoQubitState {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-9;

  /// Validates the invariants; eigenvalues in [-kPositivityTol, 0) are clipped
  /// to zero. Throws NumericalError otherwise.
  static TwoQubitState from_matrix(const Matrix4& rho);
  /// Pure state |psi><psi| of a normalized amplitude vector.
  static TwoQubitState pure(const std::array<Complex, 4>& psi);

  const Matrix4& rho() const { return rho_; }
  double trace() const { return rho_.trace().real(); }
  double purity() const;
  /// Smallest eigenvalue of rho.
  double min_eigenvalue() const;
  /// Partial trace over the other arm, as a 2x2 density matrix.
  SingleQubitOperator reduced(Arm arm) const;

 private:
  friend TwoQubitState trusted_state(const Matrix4& rho);
  explicit TwoQubitState(const Matrix4& rho) : rho_(rho) {}
  Matrix4 rho_;
};

/// (a + a^dagger) / 2
Matrix4 hermitian_part(const Matrix4& a);

/// Builds a state from the Hermitian part of a matrix already known to have
/// unit trace and be positive (the normalized image of a valid state under a
/// CP map). No eigenvalue check.
TwoQubitState trusted_state(const Matrix4& rho);

/// (|00> + |11>)/sqrt(2) as a density matrix.
TwoQubitState bell_state();

AnalyzerBasis analyzer_basis(double phi);

/// arm one -> op (x) I, arm two -> I (x) op.
Matrix4 embed(const SingleQubitOperator& op, Arm arm);

struct Branch {
  double weight;
  TwoQubitState state;
};

/// Applies K rho K^dagger; weight is its trace and the returned state is the
/// renormalized image. Throws ZeroProbabilityBranch when weight <= 1e-15.
Branch apply_operator(const TwoQubitState& state, const Matrix4& kraus);

/// K rho K^dagger without renormalization.
Matrix4 sandwich(const Matrix4& kraus, const Matrix4& rho);

/// Re Tr(a b).
double trace_product(const Matrix4& a, const Matrix4& b);

/// |ket0><ket0| - |ket1><ket1| of the analyzer basis.
SingleQubitOperator observable(const AnalyzerBasis& basis);

/// Tr(rho O1 (x) O2); a missing basis means identity on that arm.
double expectation(const TwoQubitState& state, const std::optional<AnalyzerBasis>& basis1,
                   const std::optional<AnalyzerBasis>& basis2);

void check_arm(Arm arm);

}  // namespace blgi
