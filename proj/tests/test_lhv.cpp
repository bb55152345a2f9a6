#include <catch_amalgamated.hpp>

#include <cmath>

#include "blgi/errors.hpp"
#include "blgi/lhv.hpp"

using namespace blgi;

namespace {

// Every sign table, one hidden state at a time, without the Gray-code walk.
std::pair<double, double> nested_loop_extremes(std::size_t n) {
  double best = -1e9, worst = 1e9;
  const std::uint64_t total = 1ull << (4 * n);
  for (std::uint64_t code = 0; code < total; ++code) {
    double sum = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      const auto bits = (code >> (4 * z)) & 0xF;
      const double a1 = (bits & 1) ? 1 : -1, a2 = (bits & 2) ? 1 : -1;
      const double b1 = (bits & 4) ? 1 : -1, b2 = (bits & 8) ? 1 : -1;
      sum += a1 * a2 + a1 * b2 + b1 * a2 - b1 * b2;
    }
    best = std::max(best, sum / n);
    worst = std::min(worst, sum / n);
  }
  return {best, worst};
}

LhvStrategy deterministic(std::vector<double> prep, std::vector<double> a1, std::vector<double> a2,
                          std::vector<double> b1, std::vector<double> b2) {
  LhvStrategy s;
  const std::size_t n = prep.size();
  s.prep = std::move(prep);
  s.a1 = std::move(a1);
  s.a2 = std::move(a2);
  s.b1 = std::move(b1);
  s.b2 = std::move(b2);
  s.noise1.assign(n, {});
  s.noise2.assign(n, {});
  return s;
}

}  // namespace

TEST_CASE("brute force agrees with direct enumeration", "[lhv]") {
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto [hi, lo] = nested_loop_extremes(n);
    const BruteForceResult r = brute_force_extremes(n);
    CHECK(r.max == hi);
    CHECK(r.min == lo);
    CHECK(r.strategies == (1ull << (4 * n)));
  }
  CHECK(brute_force_max(5) == 2.0);
}

TEST_CASE("brute force limits", "[lhv]") {
  CHECK_THROWS_AS(brute_force_extremes(0), InvalidArgument);
  CHECK_THROWS_AS(brute_force_extremes(kMaxBruteForceHiddenStates + 1), ResourceLimit);
}

TEST_CASE("noiseless deterministic strategy reproduces its exact correlator", "[lhv]") {
  const auto s = deterministic({0.25, 0.75}, {1, -1}, {1, 1}, {1, -1}, {-1, 1});
  const double c0 = 1 * 1 + 1 * -1 + 1 * 1 - 1 * -1;
  const double c1 = -1 * 1 + -1 * 1 + -1 * 1 - -1 * 1;
  const Estimate e = lhv_mean(s, 100000, 9);
  CHECK(std::abs(e.mean - (0.25 * c0 + 0.75 * c1)) < 4.0 * e.standard_error + 1e-12);
}

TEST_CASE("strategy validation", "[lhv]") {
  auto s = deterministic({0.5, 0.5}, {1, -1}, {1, 1}, {1, -1}, {-1, 1});
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.prep = {0.6, 0.6};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.a1 = {1.5, 0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.noise1[0] = {NoiseKind::two_point, 0.5, 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = s;
  bad.noise2[1] = {NoiseKind::gaussian, 1.0, 0.3};
  CHECK_NOTHROW(bad.validate_structure());
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK(parse_noise_kind(to_string(NoiseKind::two_point)) == NoiseKind::two_point);
  CHECK_THROWS_AS(parse_noise_kind("laplace"), InvalidArgument);
}

TEST_CASE("calibration check flags biased detectors only", "[lhv]") {
  auto s = deterministic({0.5, 0.5}, {0.3, -0.2}, {1, 0}, {1, -1}, {-1, 1});
  s.noise1 = {{NoiseKind::gaussian, 2.0, 0.0}, {NoiseKind::two_point, 1.5, 0.0}};
  s.noise2 = {{NoiseKind::none, 0.0, 0.0}, {NoiseKind::gaussian, 0.5, 0.0}};
  CHECK(calibration_check(s, kMinCalibrationShots, 4).all_pass());
  s.noise1[1].bias = 0.2;
  const auto report = calibration_check(s, kMinCalibrationShots, 4);
  CHECK_FALSE(report.all_pass());
  int flagged = 0;
  for (const auto& e : report.entries) flagged += !e.pass;
  CHECK(flagged == 1);
  CHECK_THROWS_AS(calibration_check(s, 10, 4), InvalidArgument);
}

TEST_CASE("property: random calibrated strategies respect the bound", "[lhv][property]") {
  for (NoiseKind kind : {NoiseKind::none, NoiseKind::gaussian, NoiseKind::two_point}) {
    RandomStrategyOptions options;
    options.noise = kind;
    options.noise_scale = 1.5;
    options.max_invasiveness = 1.0;
    for (std::uint64_t i = 0; i < 60; ++i) {
      ShotRng rng(1000 + i, 0);
      const auto s = random_strategy(rng, options);
      REQUIRE_NOTHROW(s.validate());
      const Estimate e = lhv_mean(s, 5000, i);
      REQUIRE(e.mean <= 2.0 + 4.0 * e.standard_error);
      REQUIRE(e.mean >= -2.0 - 4.0 * e.standard_error);
    }
  }
}

TEST_CASE("lhv records are bounded where the derivation needs it", "[lhv]") {
  RandomStrategyOptions options;
  options.max_invasiveness = 1.0;
  ShotRng gen(5, 0);
  const auto s = random_strategy(gen, options);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    ShotRng rng(6, i);
    const auto r = lhv_shot(s, rng);
    REQUIRE(std::abs(r.b1) == 1.0);
    REQUIRE(std::abs(r.b2) == 1.0);
  }
}
