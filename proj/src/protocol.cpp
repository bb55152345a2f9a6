#include "blgi/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "blgi/errors.hpp"
#include "blgi/kernels.hpp"

namespace blgi {

namespace {

constexpr std::uint64_t kBlockShots = 4096;

struct Bases {
  AnalyzerBasis a1, a2, b1, b2;

  explicit Bases(const AnalyzerAngles& angles)
      : a1(analyzer_basis(angles.a1)),
        a2(analyzer_basis(angles.a2)),
        b1(analyzer_basis(angles.b1)),
        b2(analyzer_basis(angles.b2)) {}
};

MeasurementRecord shot(const ExperimentConfig& config, const Bases& bases,
                       const TwoQubitState& initial, ShotRng& rng) {
  MeasurementRecord record;
  MeterOutcome out = sample_weak(initial, Arm::one, config.meter1, bases.a1, rng);
  record.alpha1 = out.signal;
  out = sample_weak(out.post_state, Arm::two, config.meter2, bases.a2, rng);
  record.alpha2 = out.signal;
  out = projective_sample(out.post_state, Arm::one, config.b_spec, bases.b1, rng);
  record.b1 = out.signal;
  out = projective_sample(out.post_state, Arm::two, config.b_spec, bases.b2, rng);
  record.b2 = out.signal;
  return record;
}

struct BlockStats {
  double n = 0.0;
  double sum = 0.0;
  double sumsq = 0.0;
  std::array<double, 4> terms{};
};

BlockStats merge(const BlockStats& a, const BlockStats& b) {
  BlockStats out;
  out.n = a.n + b.n;
  out.sum = a.sum + b.sum;
  out.sumsq = a.sumsq + b.sumsq;
  for (int i = 0; i < 4; ++i) out.terms[i] = a.terms[i] + b.terms[i];
  return out;
}

// Fixed pairwise tree so the reduction order never depends on scheduling.
BlockStats reduce(const std::vector<BlockStats>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(reduce(blocks, lo, mid), reduce(blocks, mid, hi));
}

BlockStats run_block(const ExperimentConfig& config, const Bases& bases,
                     const TwoQubitState& initial, std::uint64_t first, std::uint64_t count) {
  std::vector<double> c(count);
  std::array<std::vector<double>, 4> terms;
  for (auto& t : terms) t.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ShotRng rng(config.seed, first + i);
    const MeasurementRecord r = shot(config, bases, initial, rng);
    terms[0][i] = r.alpha1 * r.alpha2;
    terms[1][i] = r.alpha1 * r.b2;
    terms[2][i] = r.b1 * r.alpha2;
    terms[3][i] = r.b1 * r.b2;
    c[i] = correlator(r);
  }
  const auto& k = simd::active_kernels();
  BlockStats stats;
  stats.n = static_cast<double>(count);
  k.sum_sumsq(c.data(), count, &stats.sum, &stats.sumsq);
  double ignored = 0.0;
  for (int t = 0; t < 4; ++t) k.sum_sumsq(terms[t].data(), count, &stats.terms[t], &ignored);
  return stats;
}

unsigned worker_count(unsigned requested, std::size_t blocks) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, blocks));
}

}  // namespace

void ExperimentConfig::validate() const {
  blgi::validate(meter1);
  blgi::validate(meter2);
  b_spec.validate();
  for (double a : {angles.a1, angles.a2, angles.b1, angles.b2}) {
    if (!std::isfinite(a)) throw InvalidArgument("analyzer angles must be finite");
  }
  if (shots < 1) throw InvalidArgument("shots must be at least 1");
}

MeasurementRecord run_shot(const ExperimentConfig& config, ShotRng& rng) {
  config.validate();
  return shot(config, Bases(config.angles), bell_state(), rng);
}

MeasurementRecord run_shot(const ExperimentConfig& config, std::uint64_t index) {
  ShotRng rng(config.seed, index);
  return run_shot(config, rng);
}

void for_each_record(const ExperimentConfig& config, std::uint64_t first, std::uint64_t count,
                     const std::function<void(std::uint64_t, const MeasurementRecord&)>& sink) {
  config.validate();
  const Bases bases(config.angles);
  const TwoQubitState initial = bell_state();
  for (std::uint64_t i = first; i < first + count; ++i) {
    ShotRng rng(config.seed, i);
    sink(i, shot(config, bases, initial, rng));
  }
}

MonteCarloSummary monte_carlo_summary(const ExperimentConfig& config, RunOptions options) {
  config.validate();
  const Bases bases(config.angles);
  const TwoQubitState initial = bell_state();
  const std::size_t nblocks = (config.shots + kBlockShots - 1) / kBlockShots;
  std::vector<BlockStats> blocks(nblocks);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < nblocks; b = next++) {
      const std::uint64_t first = b * kBlockShots;
      const std::uint64_t count = std::min<std::uint64_t>(kBlockShots, config.shots - first);
      blocks[b] = run_block(config, bases, initial, first, count);
    }
  };
  const unsigned workers = worker_count(options.threads, nblocks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  const BlockStats total = reduce(blocks, 0, blocks.size());
  MonteCarloSummary out;
  out.correlator.shots = config.shots;
  out.correlator.mean = total.sum / total.n;
  if (total.n > 1.0) {
    const double var = std::max(0.0, (total.sumsq - total.sum * total.sum / total.n) / (total.n - 1.0));
    out.correlator.standard_error = std::sqrt(var / total.n);
  }
  for (int t = 0; t < 4; ++t) out.term_means[t] = total.terms[t] / total.n;
  return out;
}

Estimate monte_carlo(const ExperimentConfig& config, RunOptions options) {
  return monte_carlo_summary(config, options).correlator;
}

double analytic_mean(double xi1, double xi2, double v) {
  for (double x : {xi1, xi2, v}) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("analytic_mean arguments must lie in [0, 1]");
  }
  return (1.0 + v * xi1) * (1.0 + v * xi2) / std::numbers::sqrt2;
}

double analytic_mean(const ExperimentConfig& config) {
  config.validate();
  // Bloch vectors of all analyzers lie in the x-z plane, where the Bell-state
  // correlation of two axes is their dot product. Dephasing in the A_k basis
  // shrinks the component of B_k orthogonal to A_k by xi_k.
  const double xi1 = dephasing_factor(config.meter1);
  const double xi2 = dephasing_factor(config.meter2);
  const double v = config.b_spec.v;
  const auto& a = config.angles;
  const double c = std::cos(a.a1 - a.a2);
  const double s = std::sin(a.a1 - a.a2);
  const double c1 = std::cos(a.b1 - a.a1), s1 = std::sin(a.b1 - a.a1);
  const double c2 = std::cos(a.b2 - a.a2), s2 = std::sin(a.b2 - a.a2);
  const double a1a2 = c;
  const double a1b2 = v * (c2 * c + xi2 * s2 * s);
  const double b1a2 = v * (c1 * c - xi1 * s1 * s);
  const double b1b2 = v * v * (c1 * c2 * c + c1 * xi2 * s2 * s - xi1 * s1 * c2 * s +
                               xi1 * xi2 * s1 * s2 * c);
  return a1a2 + a1b2 + b1a2 - b1b2;
}

double violation_threshold() { return std::pow(2.0, 0.75) - 1.0; }

}  // namespace blgi
