#include "blgi/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "blgi/errors.hpp"
#include "blgi/kernels.hpp"

namespace blgi {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InvalidArgument(what); }

void check_range(const std::vector<double>& values, const char* name) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= -1.0 && values[i] <= 1.0)) {
      std::ostringstream os;
      os << name << "[" << i << "] = " << values[i] << " lies outside [-1, 1]";
      bad(os.str());
    }
  }
}

double sample_noise(const NoiseModel& noise, double property, ShotRng& rng) {
  switch (noise.kind) {
    case NoiseKind::none:
      return property + noise.bias;
    case NoiseKind::gaussian: {
      std::normal_distribution<double> dist(property, noise.scale);
      return dist(rng) + noise.bias;
    }
    case NoiseKind::two_point: {
      const double p_plus = 0.5 * (1.0 + property / noise.scale);
      return (rng.bernoulli(p_plus) ? noise.scale : -noise.scale) + noise.bias;
    }
  }
  return property;
}

std::size_t draw_hidden_state(const std::vector<double>& prep, ShotRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < prep.size(); ++i) {
    acc += prep[i];
    if (u < acc) return i;
  }
  return prep.size() - 1;
}

double draw_b(double property, double kappa, double alpha_residual, ShotRng& rng) {
  const double mean = std::clamp(property + kappa * alpha_residual, -1.0, 1.0);
  return rng.bernoulli(0.5 * (1.0 + mean)) ? 1.0 : -1.0;
}

}  // namespace

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::two_point: return "two_point";
  }
  return "?";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "two_point" || name == "two-point") return NoiseKind::two_point;
  bad("unknown noise kind '" + name + "' (expected none, gaussian, two_point)");
}

void LhvStrategy::validate_structure() const {
  const std::size_t n = prep.size();
  if (n < 1) bad("strategy needs at least one hidden state");
  for (const auto* v : {&a1, &a2, &b1, &b2}) {
    if (v->size() != n) bad("property tables must have one entry per hidden state");
  }
  if (noise1.size() != n || noise2.size() != n) {
    bad("noise models must have one entry per hidden state");
  }
  double total = 0.0;
  for (double p : prep) {
    if (!(p >= 0.0)) bad("prep probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "prep must sum to 1 (sums to " << total << ")";
    bad(os.str());
  }
  check_range(a1, "a1");
  check_range(a2, "a2");
  check_range(b1, "b1");
  check_range(b2, "b2");
  for (const auto* models : {&noise1, &noise2}) {
    for (const NoiseModel& m : *models) {
      if (!std::isfinite(m.scale) || !std::isfinite(m.bias)) bad("noise parameters must be finite");
      if (m.kind == NoiseKind::gaussian && !(m.scale > 0.0)) bad("gaussian noise needs scale > 0");
      if (m.kind == NoiseKind::two_point && !(m.scale >= 1.0)) {
        bad("two_point noise needs scale >= 1");
      }
    }
  }
  if (!std::isfinite(invasiveness1) || !std::isfinite(invasiveness2)) {
    bad("invasiveness must be finite");
  }
}

void LhvStrategy::validate() const {
  validate_structure();
  for (std::size_t z = 0; z < prep.size(); ++z) {
    for (const NoiseModel* m : {&noise1[z], &noise2[z]}) {
      if (std::abs(m->bias) > 1e-12) {
        bad("noise model for hidden state " + std::to_string(z) +
            " is not calibrated (its mean differs from the property value)");
      }
    }
  }
}

MeasurementRecord lhv_shot(const LhvStrategy& s, ShotRng& rng) {
  const std::size_t z = draw_hidden_state(s.prep, rng);
  MeasurementRecord r;
  r.alpha1 = sample_noise(s.noise1[z], s.a1[z], rng);
  r.alpha2 = sample_noise(s.noise2[z], s.a2[z], rng);
  r.b1 = draw_b(s.b1[z], s.invasiveness1, r.alpha1 - s.a1[z], rng);
  r.b2 = draw_b(s.b2[z], s.invasiveness2, r.alpha2 - s.a2[z], rng);
  return r;
}

Estimate lhv_mean(const LhvStrategy& strategy, std::uint64_t shots, std::uint64_t seed) {
  strategy.validate();
  if (shots < 1) bad("shots must be at least 1");
  std::vector<double> c(shots);
  for (std::uint64_t i = 0; i < shots; ++i) {
    ShotRng rng(seed, i);
    c[i] = correlator(lhv_shot(strategy, rng));
  }
  double sum = 0.0;
  double sumsq = 0.0;
  simd::active_kernels().sum_sumsq(c.data(), c.size(), &sum, &sumsq);
  Estimate e;
  e.shots = shots;
  const double n = static_cast<double>(shots);
  e.mean = sum / n;
  if (shots > 1) {
    e.standard_error = std::sqrt(std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) / n);
  }
  return e;
}

BruteForceResult brute_force_extremes(std::size_t num_hidden_states) {
  if (num_hidden_states < 1) bad("need at least one hidden state");
  if (num_hidden_states > kMaxBruteForceHiddenStates) {
    throw ResourceLimit("brute-force enumeration is limited to " +
                        std::to_string(kMaxBruteForceHiddenStates) + " hidden states");
  }
  const std::size_t n = num_hidden_states;
  const std::size_t bits = 4 * n;
  // Bit 4z + j holds property j of hidden state z (0: A1, 1: A2, 2: B1, 3: B2);
  // a set bit means -1. Gray-code order changes one sign per step.
  std::vector<int> sign(bits, 1);
  auto local = [&](std::size_t z) {
    const int a1 = sign[4 * z], a2 = sign[4 * z + 1], b1 = sign[4 * z + 2], b2 = sign[4 * z + 3];
    return a1 * a2 + a1 * b2 + b1 * a2 - b1 * b2;
  };
  std::vector<int> term(n);
  long long total = 0;
  for (std::size_t z = 0; z < n; ++z) {
    term[z] = local(z);
    total += term[z];
  }
  long long best = total;
  long long worst = total;
  const std::uint64_t count = std::uint64_t{1} << bits;
  for (std::uint64_t step = 1; step < count; ++step) {
    const auto bit = static_cast<std::size_t>(__builtin_ctzll(step));
    sign[bit] = -sign[bit];
    const std::size_t z = bit / 4;
    const int updated = local(z);
    total += updated - term[z];
    term[z] = updated;
    best = std::max(best, total);
    worst = std::min(worst, total);
  }
  const double scale = 1.0 / static_cast<double>(n);
  return BruteForceResult{static_cast<double>(best) * scale, static_cast<double>(worst) * scale,
                          count};
}

double brute_force_max(std::size_t num_hidden_states) {
  return brute_force_extremes(num_hidden_states).max;
}

bool CalibrationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

CalibrationReport calibration_check(const LhvStrategy& strategy, std::uint64_t shots,
                                    std::uint64_t seed) {
  strategy.validate_structure();
  if (shots < kMinCalibrationShots) {
    bad("calibration needs at least " + std::to_string(kMinCalibrationShots) + " shots");
  }
  CalibrationReport report;
  std::vector<double> samples(shots);
  std::uint64_t stream = 0;
  for (std::size_t z = 0; z < strategy.num_hidden_states(); ++z) {
    for (int arm = 1; arm <= 2; ++arm) {
      const NoiseModel& noise = arm == 1 ? strategy.noise1[z] : strategy.noise2[z];
      const double declared = arm == 1 ? strategy.a1[z] : strategy.a2[z];
      ShotRng rng(seed, stream++);
      for (auto& x : samples) x = sample_noise(noise, declared, rng);
      double sum = 0.0;
      double sumsq = 0.0;
      simd::active_kernels().sum_sumsq(samples.data(), samples.size(), &sum, &sumsq);
      const double n = static_cast<double>(shots);
      const double mean = sum / n;
      const double se = std::sqrt(std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) / n);
      const double miss = std::abs(mean - declared);
      // Noiseless detectors must reproduce the property to roundoff.
      const bool pass = se > 0.0 ? miss < 5.0 * se : miss <= 1e-12;
      report.entries.push_back({z, arm, declared, mean, se, pass});
    }
  }
  return report;
}

LhvStrategy random_strategy(ShotRng& rng, const RandomStrategyOptions& options) {
  if (options.num_hidden_states < 1) bad("need at least one hidden state");
  const std::size_t n = options.num_hidden_states;
  LhvStrategy s;
  std::exponential_distribution<double> spacing(1.0);
  s.prep.resize(n);
  double total = 0.0;
  for (auto& p : s.prep) total += (p = spacing(rng));
  for (auto& p : s.prep) p /= total;
  // Absorb the normalization roundoff into the last entry.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += s.prep[i];
  s.prep[n - 1] = 1.0 - head;

  auto property = [&] { return 2.0 * rng.uniform() - 1.0; };
  for (auto* v : {&s.a1, &s.a2, &s.b1, &s.b2}) {
    v->resize(n);
    for (auto& x : *v) x = property();
  }
  const NoiseModel noise{options.noise, options.noise_scale, 0.0};
  s.noise1.assign(n, noise);
  s.noise2.assign(n, noise);
  s.invasiveness1 = options.max_invasiveness * (2.0 * rng.uniform() - 1.0);
  s.invasiveness2 = options.max_invasiveness * (2.0 * rng.uniform() - 1.0);
  return s;
}

}  // namespace blgi
