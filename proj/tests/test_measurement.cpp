#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "blgi/errors.hpp"
#include "blgi/measurement.hpp"

using namespace blgi;

namespace {

TwoQubitState product_zero() { return TwoQubitState::pure({1, 0, 0, 0}); }

TwoQubitState random_mixed_state(std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Matrix4 g;
  for (auto& z : g.m) z = {normal(gen), normal(gen)};
  Matrix4 rho = g * g.adjoint();
  return TwoQubitState::from_matrix((1.0 / rho.trace().real()) * rho);
}

// Trapezoid rule over a window wide enough that the Gaussian tails vanish.
SingleQubitOperator integrate_kraus_squares(double sigma, const AnalyzerBasis& basis) {
  const double lo = -1.0 - 14.0 * sigma;
  const double hi = 1.0 + 14.0 * sigma;
  const int n = 40000;
  const double h = (hi - lo) / n;
  SingleQubitOperator acc;
  for (int i = 0; i <= n; ++i) {
    const auto k = gaussian_kraus(lo + h * i, sigma, basis);
    const auto kk = k.adjoint() * k;
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    for (int j = 0; j < 4; ++j) acc.m[j] += w * kk.m[j];
  }
  return acc;
}

double max_identity_deviation(const SingleQubitOperator& op) {
  double worst = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(op(r, c) - (r == c ? 1.0 : 0.0)));
  }
  return worst;
}

}  // namespace

TEST_CASE("Gaussian Kraus family is complete", "[measurement]") {
  for (double sigma : {0.3, 1.0, 4.0}) {
    for (double phi : {0.0, 0.9}) {
      const auto total = integrate_kraus_squares(sigma, analyzer_basis(phi));
      INFO("sigma " << sigma << " phi " << phi);
      CHECK(max_identity_deviation(total) < 1e-8);
    }
  }
}

TEST_CASE("ancilla Kraus pair is complete and has the expected entries", "[measurement]") {
  const auto basis = analyzer_basis(0.0);
  const auto plus = ancilla_kraus(Sign::plus, 0.6, basis);
  CHECK(plus(0, 0).real() == Catch::Approx(std::sqrt(0.8)));
  CHECK(plus(1, 1).real() == Catch::Approx(std::sqrt(0.2)));
  const auto projector = ancilla_kraus(Sign::plus, 1.0, basis);
  CHECK(std::abs(projector(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(projector(1, 1)) < 1e-15);
  for (double v : {0.05, 0.5, 0.99, 1.0}) {
    const auto tilted = analyzer_basis(1.1);
    const auto p = ancilla_kraus(Sign::plus, v, tilted);
    const auto m = ancilla_kraus(Sign::minus, v, tilted);
    CHECK(max_identity_deviation(p.adjoint() * p + m.adjoint() * m) < 1e-15);
  }
  CHECK_THROWS_AS(ancilla_kraus(Sign::plus, 0.0, basis), InvalidArgument);
  CHECK_THROWS_AS(ancilla_kraus(Sign::plus, 1.5, basis), InvalidArgument);
}

TEST_CASE("meter specs validate their domains", "[measurement]") {
  CHECK_THROWS_AS(GaussianMeterSpec({0.0, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(GaussianMeterSpec({1.0, 0.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(GaussianMeterSpec({1.0, 1.2}).validate(), InvalidArgument);
  CHECK_THROWS_AS(AncillaMeterSpec({0.9, 0.8}).validate(), InvalidArgument);
  CHECK_THROWS_AS(AncillaMeterSpec({0.0, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(ProjectiveMeterSpec({1.1}).validate(), InvalidArgument);
  CHECK_NOTHROW(ProjectiveMeterSpec({0.0}).validate());
  CHECK_NOTHROW(AncillaMeterSpec({0.8, 0.8}).validate());
}

TEST_CASE("dephasing factors", "[measurement]") {
  CHECK(dephasing_factor(AncillaMeterSpec{0.6, 1.0}) == Catch::Approx(0.8).margin(1e-15));
  CHECK(dephasing_factor(AncillaMeterSpec{0.6, 0.8}) == Catch::Approx(std::sqrt(1 - 0.75 * 0.75)));
  CHECK(dephasing_factor(AncillaMeterSpec{1.0, 1.0}) == 0.0);
  CHECK(dephasing_factor(GaussianMeterSpec{1.0, 1.0}) == Catch::Approx(std::exp(-0.5)));
  CHECK(dephasing_factor(GaussianMeterSpec{2.0, 0.5}) == Catch::Approx(std::exp(-1.0 / 4.0)));
  CHECK(dephasing_factor(GaussianMeterSpec{1e6, 1.0}) == Catch::Approx(1.0));
  CHECK(inefficiency_dephasing(GaussianMeterSpec{1.0, 1.0}) == 1.0);
}

TEST_CASE("unread weak measurement equals the dephasing channel", "[measurement]") {
  std::mt19937_64 gen(5);
  const TwoQubitState state = random_mixed_state(gen);
  const auto basis = analyzer_basis(0.8);
  const std::vector<WeakMeterSpec> specs = {GaussianMeterSpec{0.7, 1.0}, GaussianMeterSpec{2.0, 0.5},
                                            AncillaMeterSpec{0.6, 1.0}, AncillaMeterSpec{0.5, 0.7}};
  for (const auto& spec : specs) {
    for (Arm arm : {Arm::one, Arm::two}) {
      const Matrix4 channel = average_over_outcomes(state.rho(), arm, spec, basis);
      const auto dephased = apply_dephasing(state, arm, dephasing_factor(spec), basis);
      CHECK(channel.max_abs_diff(dephased.rho()) < 1e-10);
    }
  }
}

TEST_CASE("no signaling: one arm's measurement leaves the other arm unchanged", "[measurement]") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const TwoQubitState state = random_mixed_state(gen);
    const auto basis = analyzer_basis(0.3 * trial);
    const auto before = state.reduced(Arm::two);
    for (const WeakMeterSpec& spec :
         {WeakMeterSpec{GaussianMeterSpec{0.5, 0.7}}, WeakMeterSpec{AncillaMeterSpec{0.4, 0.9}}}) {
      const auto after = trusted_state(average_over_outcomes(state.rho(), Arm::one, spec, basis));
      const auto red = after.reduced(Arm::two);
      for (int j = 0; j < 4; ++j) REQUIRE(std::abs(red.m[j] - before.m[j]) < 1e-10);
    }
    const auto projected =
        trusted_state(average_over_outcomes(state.rho(), Arm::one, ProjectiveMeterSpec{0.8}, basis));
    const auto red = projected.reduced(Arm::two);
    for (int j = 0; j < 4; ++j) REQUIRE(std::abs(red.m[j] - before.m[j]) < 1e-10);
  }
}

TEST_CASE("ancilla signals on an eigenstate", "[measurement]") {
  const auto basis = analyzer_basis(0.0);
  const AncillaMeterSpec spec{0.5, 1.0};
  int plus = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    ShotRng rng(17, i);
    const auto o = sample_ancilla(product_zero(), Arm::one, spec, basis, rng);
    REQUIRE(std::abs(std::abs(o.signal) - 2.0) < 1e-15);
    plus += o.signal > 0;
  }
  const double p = static_cast<double>(plus) / n;
  CHECK(std::abs(p - 0.75) < 5.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST_CASE("projective limit of the ancilla meter", "[measurement]") {
  const auto basis = analyzer_basis(0.0);
  for (int i = 0; i < 100; ++i) {
    ShotRng rng(3, i);
    const auto o = sample_ancilla(product_zero(), Arm::two, AncillaMeterSpec{1.0, 1.0}, basis, rng);
    REQUIRE(o.signal == 1.0);
  }
}

TEST_CASE("calibration: weak and projective signals average to the property", "[measurement]") {
  // Product state |0>|0> read along phi = 0.7: <A> = cos(0.7).
  const auto basis = analyzer_basis(0.7);
  const double target = std::cos(0.7);
  const int n = 100000;
  auto check_mean = [&](auto&& draw, double expected) {
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      ShotRng rng(23, i);
      const double s = draw(rng);
      sum += s;
      sumsq += s * s;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - expected) < 4.0 * se);
  };
  check_mean([&](ShotRng& r) { return sample_gaussian(product_zero(), Arm::one, {1.5, 0.6}, basis, r).signal; },
             target);
  check_mean([&](ShotRng& r) { return sample_ancilla(product_zero(), Arm::one, {0.4, 0.8}, basis, r).signal; },
             target);
  check_mean([&](ShotRng& r) { return projective_sample(product_zero(), Arm::one, {1.0}, basis, r).signal; },
             target);
  check_mean([&](ShotRng& r) { return projective_sample(product_zero(), Arm::one, {0.7}, basis, r).signal; },
             0.7 * target);
}

TEST_CASE("property: states stay valid under long random update chains", "[measurement][property]") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> angle(0.0, 6.3);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  TwoQubitState state = bell_state();
  ShotRng rng(77, 0);
  for (int step = 0; step < 2000; ++step) {
    const Arm arm = (step % 2) ? Arm::one : Arm::two;
    const auto basis = analyzer_basis(angle(gen));
    switch (step % 3) {
      case 0: state = sample_gaussian(state, arm, {unit(gen) * 3, unit(gen)}, basis, rng).post_state; break;
      case 1: {
        const double u = unit(gen);
        state = sample_ancilla(state, arm, {u * unit(gen), u}, basis, rng).post_state;
        break;
      }
      default: state = projective_sample(state, arm, {unit(gen)}, basis, rng).post_state; break;
    }
    REQUIRE(std::abs(state.trace() - 1.0) < 1e-10);
    REQUIRE(state.min_eigenvalue() > -1e-9);
    REQUIRE(state.rho().max_abs_diff(state.rho().adjoint()) < 1e-10);
  }
}

TEST_CASE("dephasing rejects factors outside [0, 1]", "[measurement]") {
  const auto basis = analyzer_basis(0.0);
  CHECK_THROWS_AS(apply_dephasing(bell_state(), Arm::one, 1.5, basis), InvalidArgument);
  CHECK_THROWS_AS(apply_dephasing(bell_state(), Arm::one, -0.1, basis), InvalidArgument);
  const auto full = apply_dephasing(bell_state(), Arm::one, 0.0, basis);
  CHECK(std::abs(full.rho()(0, 3)) < 1e-15);
}
