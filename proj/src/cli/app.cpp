#include "blgi/cli/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "blgi/cli/config_file.hpp"
#include "blgi/cli/strategy_file.hpp"
#include "blgi/cli/verify.hpp"
#include "blgi/errors.hpp"
#include "blgi/lhv.hpp"
#include "blgi/protocol.hpp"

namespace blgi::cli {

namespace {

using nlohmann::json;

constexpr double kLmrBound = 2.0;
constexpr std::uint64_t kStrategyTag = 0x5354524154454759ull;  // "STRATEGY"
constexpr std::uint64_t kShotTag = 0x53484f5453484f54ull;      // "SHOTSHOT"
constexpr double kStderrWarning = 0.05;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out_path;
  std::string manifest_path;
};

// Per-run overrides of the configuration file. Angles stay text so that
// `pi` expressions work on the command line.
struct Overrides {
  std::optional<std::string> meter;
  std::optional<double> sigma, eta, v_total, u, v;
  std::optional<std::string> shots;
  std::optional<std::string> phi_a1, phi_a2, phi_b1, phi_b2;
};

struct SimulateParams {
  ExperimentConfig config;
  std::string records_path;
};

struct SweepParams {
  ExperimentConfig config;
  SweepAxis axis = SweepAxis::sigma;
  std::vector<double> values;
  bool monte_carlo = true;
};

struct LhvParams {
  std::vector<std::string> strategy_files;
  std::uint64_t random_count = 0;
  std::uint64_t shots = 10000;
  std::size_t hidden_states = 4;
  bool brute_force = false;
  NoiseKind noise = NoiseKind::gaussian;
  double noise_scale = 1.0;
  double max_invasiveness = 0.5;
  std::uint64_t calibration_shots = kMinCalibrationShots;
  std::uint64_t seed = kDefaultSeed;
};

template <typename Spec>
Spec& meter_for_flag(WeakMeterSpec& meter, const char* flag) {
  if (auto* s = std::get_if<Spec>(&meter)) return *s;
  throw InvalidArgument(std::string(flag) + " does not apply to the configured meter type");
}

std::uint64_t resolve_seed(const GlobalOptions& global, std::uint64_t from_config) {
  if (global.seed) return *global.seed;
  if (const char* env = std::getenv("BLGI_SEED")) return parse_count(env, "BLGI_SEED");
  return from_config;
}

ExperimentConfig resolve_config(const GlobalOptions& global, const Overrides& o) {
  ExperimentConfig config;
  if (!global.config_path.empty()) config = apply_config(ConfigDocument::load(global.config_path));
  if (o.meter) {
    for (WeakMeterSpec* m : {&config.meter1, &config.meter2}) {
      if (*o.meter == "gaussian") {
        if (!std::holds_alternative<GaussianMeterSpec>(*m)) *m = GaussianMeterSpec{};
      } else if (*o.meter == "ancilla") {
        if (!std::holds_alternative<AncillaMeterSpec>(*m)) *m = AncillaMeterSpec{};
      } else {
        throw InvalidArgument("--meter must be 'gaussian' or 'ancilla'");
      }
    }
  }
  for (WeakMeterSpec* m : {&config.meter1, &config.meter2}) {
    if (o.sigma) meter_for_flag<GaussianMeterSpec>(*m, "--sigma").sigma = *o.sigma;
    if (o.eta) meter_for_flag<GaussianMeterSpec>(*m, "--eta").eta = *o.eta;
    if (o.v_total) meter_for_flag<AncillaMeterSpec>(*m, "--v-total").v_total = *o.v_total;
    if (o.u) meter_for_flag<AncillaMeterSpec>(*m, "--u").u = *o.u;
  }
  if (o.v) config.b_spec.v = *o.v;
  if (o.shots) config.shots = parse_count(*o.shots, "--shots");
  if (o.phi_a1) config.angles.a1 = parse_real(*o.phi_a1, "--phi-a1");
  if (o.phi_a2) config.angles.a2 = parse_real(*o.phi_a2, "--phi-a2");
  if (o.phi_b1) config.angles.b1 = parse_real(*o.phi_b1, "--phi-b1");
  if (o.phi_b2) config.angles.b2 = parse_real(*o.phi_b2, "--phi-b2");
  config.seed = resolve_seed(global, config.seed);
  config.validate();
  return config;
}

// Output goes to a file when a path is given, else to the command's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw InvalidArgument("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

json manifest_base(const std::string& command, const std::string& out_path) {
  return json{{"tool", kToolName},
              {"version", kVersion},
              {"timestamp", timestamp_utc()},
              {"command", command},
              {"outputs", {{"out", out_path}}}};
}

void write_manifest(const GlobalOptions& global, const json& manifest) {
  std::string path = global.manifest_path;
  if (path.empty() && !global.out_path.empty()) path = global.out_path + ".manifest.json";
  if (path.empty()) return;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidArgument("cannot write manifest '" + path + "'");
  file << manifest.dump(2) << "\n";
}

// ---- simulate ------------------------------------------------------------

int cmd_simulate(const SimulateParams& p, const GlobalOptions& global, std::ostream& out,
                 std::ostream& err) {
  const ExactResult exact = exact_moments(p.config);
  const double predicted = std::sqrt(std::max(0.0, exact.variance()) / static_cast<double>(p.config.shots));
  if (predicted > kStderrWarning) {
    err << "warning: predicted standard error " << format_real(predicted) << " exceeds "
        << kStderrWarning << " for " << p.config.shots << " shots\n";
  }
  const Estimate mc = monte_carlo(p.config, RunOptions{global.threads});
  const double analytic = analytic_mean(p.config);
  const bool violation = mc.mean - 4.0 * mc.standard_error > kLmrBound;

  Sink sink(global.out_path, out);
  auto& os = sink.stream();
  os << "shots,mc_mean,mc_stderr,exact,analytic,violation\n"
     << mc.shots << "," << format_real(mc.mean) << "," << format_real(mc.standard_error) << ","
     << format_real(exact.mean) << "," << format_real(analytic) << ","
     << (violation ? "true" : "false") << "\n";

  if (!p.records_path.empty()) {
    Sink records(p.records_path, out);
    auto& rs = records.stream();
    rs << "shot,alpha1,alpha2,b1,b2,c\n";
    for_each_record(p.config, 0, p.config.shots, [&](std::uint64_t i, const MeasurementRecord& r) {
      rs << i << "," << format_real(r.alpha1) << "," << format_real(r.alpha2) << ","
         << format_real(r.b1) << "," << format_real(r.b2) << "," << format_real(correlator(r))
         << "\n";
    });
  }

  json manifest = manifest_base("simulate", global.out_path);
  manifest["seed"] = p.config.seed;
  manifest["config"] = write_config(p.config);
  manifest["outputs"]["records"] = p.records_path;
  write_manifest(global, manifest);
  return kExitOk;
}

// ---- sweep ---------------------------------------------------------------

int cmd_sweep(const SweepParams& p, const GlobalOptions& global, std::ostream& out) {
  SweepOptions options;
  options.run.threads = global.threads;
  options.monte_carlo = p.monte_carlo;
  const std::vector<SweepRow> rows = sweep(p.config, p.axis, p.values, options);

  Sink sink(global.out_path, out);
  auto& os = sink.stream();
  os << "# axis=" << to_string(p.axis) << ",lmr_bound=" << format_real(kLmrBound)
     << ",quantum_bound=" << format_real(2.0 * std::numbers::sqrt2) << "\n";
  os << "value,mc_mean,mc_stderr,exact,analytic\n";
  for (const auto& r : rows) {
    os << format_real(r.value) << ",";
    if (p.monte_carlo) {
      os << format_real(r.mc.mean) << "," << format_real(r.mc.standard_error);
    } else {
      os << "nan,nan";
    }
    os << "," << format_real(r.exact) << "," << format_real(r.analytic) << "\n";
  }

  json manifest = manifest_base("sweep", global.out_path);
  manifest["seed"] = p.config.seed;
  manifest["config"] = write_config(p.config);
  manifest["sweep"] = {{"axis", to_string(p.axis)}, {"values", p.values}, {"monte_carlo", p.monte_carlo}};
  write_manifest(global, manifest);
  return kExitOk;
}

// ---- lhv -----------------------------------------------------------------

struct StrategyOutcome {
  Estimate estimate;
  bool bound_ok = false;
  bool calibration_ok = true;
};

int cmd_lhv(const LhvParams& p, const GlobalOptions& global, std::ostream& out) {
  if (p.strategy_files.empty() && p.random_count == 0 && !p.brute_force) {
    throw InvalidArgument("lhv needs --strategy, --random or --brute-force");
  }
  if (p.shots < 1) throw InvalidArgument("--shots must be at least 1");

  std::vector<std::string> names;
  std::vector<LhvStrategy> strategies;
  for (const auto& path : p.strategy_files) {
    strategies.push_back(load_strategy(path));
    names.push_back(path);
  }
  RandomStrategyOptions generator;
  generator.num_hidden_states = p.hidden_states;
  generator.noise = p.noise;
  generator.noise_scale = p.noise_scale;
  generator.max_invasiveness = p.max_invasiveness;
  for (std::uint64_t i = 0; i < p.random_count; ++i) {
    ShotRng rng(derive_seed(p.seed, kStrategyTag, i), 0);
    strategies.push_back(random_strategy(rng, generator));
    names.push_back("random-" + std::to_string(i));
  }

  std::vector<StrategyOutcome> outcomes(strategies.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < strategies.size(); i = next++) {
      StrategyOutcome& o = outcomes[i];
      const std::uint64_t seed = derive_seed(p.seed, kShotTag, i);
      o.estimate = lhv_mean(strategies[i], p.shots, seed);
      const double slack = 4.0 * o.estimate.standard_error;
      o.bound_ok = o.estimate.mean <= kLmrBound + slack && o.estimate.mean >= -kLmrBound - slack;
      if (p.calibration_shots > 0) {
        o.calibration_ok = calibration_check(strategies[i], p.calibration_shots, seed).all_pass();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(global.threads == 0 ? hw : global.threads, std::max<std::size_t>(1, strategies.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  Sink sink(global.out_path, out);
  auto& os = sink.stream();
  std::size_t violations = 0;
  std::size_t miscalibrated = 0;
  if (!strategies.empty()) {
    os << "strategy,hidden_states,mean,stderr,bound_ok,calibration_ok\n";
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      const auto& o = outcomes[i];
      violations += !o.bound_ok;
      miscalibrated += !o.calibration_ok;
      os << names[i] << "," << strategies[i].num_hidden_states() << ","
         << format_real(o.estimate.mean) << "," << format_real(o.estimate.standard_error) << ","
         << (o.bound_ok ? "true" : "false") << "," << (o.calibration_ok ? "true" : "false") << "\n";
    }
  }

  bool brute_ok = true;
  if (p.brute_force) {
    const BruteForceResult r = brute_force_extremes(p.hidden_states);
    brute_ok = r.max <= kLmrBound && r.min >= -kLmrBound;
    char line[160];
    std::snprintf(line, sizeof line,
                  "# brute-force over %llu deterministic strategies with %zu hidden states: "
                  "max <C> = %.6f, min <C> = %.6f\n",
                  static_cast<unsigned long long>(r.strategies), p.hidden_states, r.max, r.min);
    os << line;
  }
  if (!strategies.empty()) {
    os << "# strategies=" << strategies.size() << ",bound_violations=" << violations
       << ",calibration_flags=" << miscalibrated << "\n";
  }

  json manifest = manifest_base("lhv", global.out_path);
  manifest["seed"] = p.seed;
  manifest["lhv"] = {{"strategy_files", p.strategy_files},
                     {"random", p.random_count},
                     {"shots", p.shots},
                     {"hidden_states", p.hidden_states},
                     {"brute_force", p.brute_force},
                     {"noise", to_string(p.noise)},
                     {"noise_scale", p.noise_scale},
                     {"max_invasiveness", p.max_invasiveness},
                     {"calibration_shots", p.calibration_shots}};
  write_manifest(global, manifest);
  return violations == 0 && brute_ok ? kExitOk : kExitBoundViolation;
}

// ---- verify --------------------------------------------------------------

int cmd_verify(const GlobalOptions& global, std::ostream& out) {
  const auto results = run_verification();
  Sink sink(global.out_path, out);
  auto& os = sink.stream();
  bool all = true;
  os << std::left << std::setw(54) << "check" << std::setw(14) << "deviation" << std::setw(12)
     << "tolerance" << "result\n";
  for (const auto& r : results) {
    all = all && r.pass;
    char dev[32], tol[32];
    std::snprintf(dev, sizeof dev, "%.3e", r.deviation);
    std::snprintf(tol, sizeof tol, "%.1e", r.tolerance);
    os << std::left << std::setw(54) << r.name << std::setw(14) << dev << std::setw(12) << tol
       << (r.pass ? "PASS" : "FAIL") << "\n";
  }
  return all ? kExitOk : kExitNumerical;
}

// ---- replay --------------------------------------------------------------

int replay(const GlobalOptions& global, std::ostream& out, std::ostream& err) {
  std::ifstream file(global.manifest_path);
  if (!file) throw InvalidArgument("cannot open manifest '" + global.manifest_path + "'");
  json m;
  try {
    m = json::parse(file);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("manifest '" + global.manifest_path + "' is not valid JSON: " + e.what());
  }
  const std::string command = m.value("command", "");
  GlobalOptions g = global;
  g.manifest_path.clear();  // do not overwrite the manifest being replayed
  if (g.out_path.empty()) g.out_path = m["outputs"].value("out", "");

  auto config_from = [&] {
    return apply_config(ConfigDocument::parse(m.at("config").get<std::string>(), "manifest config"));
  };
  if (command == "simulate") {
    SimulateParams p{config_from(), m["outputs"].value("records", "")};
    return cmd_simulate(p, g, out, err);
  }
  if (command == "sweep") {
    SweepParams p;
    p.config = config_from();
    p.axis = parse_sweep_axis(m["sweep"].at("axis").get<std::string>());
    p.values = m["sweep"].at("values").get<std::vector<double>>();
    p.monte_carlo = m["sweep"].value("monte_carlo", true);
    return cmd_sweep(p, g, out);
  }
  if (command == "lhv") {
    const json& l = m.at("lhv");
    LhvParams p;
    p.strategy_files = l.at("strategy_files").get<std::vector<std::string>>();
    p.random_count = l.at("random").get<std::uint64_t>();
    p.shots = l.at("shots").get<std::uint64_t>();
    p.hidden_states = l.at("hidden_states").get<std::size_t>();
    p.brute_force = l.at("brute_force").get<bool>();
    p.noise = parse_noise_kind(l.at("noise").get<std::string>());
    p.noise_scale = l.at("noise_scale").get<double>();
    p.max_invasiveness = l.at("max_invasiveness").get<double>();
    p.calibration_shots = l.at("calibration_shots").get<std::uint64_t>();
    p.seed = m.at("seed").get<std::uint64_t>();
    return cmd_lhv(p, g, out);
  }
  if (command == "verify") return cmd_verify(g, out);
  throw InvalidArgument("manifest names unknown command '" + command + "'");
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--meter", o.meter, "Weak meter type for both arms: gaussian | ancilla");
  cmd->add_option("--sigma", o.sigma, "Gaussian signal standard deviation");
  cmd->add_option("--eta", o.eta, "Gaussian meter efficiency in (0, 1]");
  cmd->add_option("--v-total", o.v_total, "Ancilla total visibility V");
  cmd->add_option("--u", o.u, "Ancilla readout visibility");
  cmd->add_option("--v", o.v, "Visibility of the B measurements");
  cmd->add_option("--shots", o.shots, "Monte-Carlo shots");
  cmd->add_option("--phi-a1", o.phi_a1, "Analyzer angle of A1 (radians, pi expressions allowed)");
  cmd->add_option("--phi-a2", o.phi_a2, "Analyzer angle of A2");
  cmd->add_option("--phi-b1", o.phi_b1, "Analyzer angle of B1");
  cmd->add_option("--phi-b2", o.phi_b2, "Analyzer angle of B2");
}

std::vector<double> logspace(const std::vector<double>& spec) {
  if (spec.size() != 3 || !(spec[0] > 0.0) || !(spec[1] > 0.0) || spec[2] < 2.0 ||
      std::floor(spec[2]) != spec[2]) {
    throw InvalidArgument("--logspace expects START,STOP,COUNT with positive bounds and COUNT >= 2");
  }
  const auto n = static_cast<std::size_t>(spec[2]);
  std::vector<double> out(n);
  const double lo = std::log(spec[0]);
  const double hi = std::log(spec[1]);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = spec[0];
  out.back() = spec[1];
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid Bell / Leggett-Garg correlator simulator", kToolName};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);

  GlobalOptions global;
  app.add_option("--config", global.config_path, "Experiment configuration file");
  app.add_option("--seed", global.seed, "Random seed (overrides BLGI_SEED and the config file)");
  app.add_option("--threads", global.threads, "Worker threads (0 = all cores); never changes results");
  app.add_option("--out", global.out_path, "Output CSV path (default: stdout)");
  app.add_option("--manifest", global.manifest_path,
                 "Write the run manifest here; without a subcommand, replay it");

  Overrides sim_overrides;
  SimulateParams sim;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate of <C> for one configuration");
  add_overrides(simulate, sim_overrides);
  simulate->add_option("--records", sim.records_path, "Also write every shot's record to this CSV");
  simulate->fallthrough();

  Overrides sweep_overrides;
  SweepParams sw;
  std::string axis_name;
  std::vector<double> values;
  std::vector<double> logspace_spec;
  bool no_mc = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate <C> along one parameter axis");
  add_overrides(sweep_cmd, sweep_overrides);
  sweep_cmd->add_option("--axis", axis_name, "sigma | eta | v | v_total | u")->required();
  auto* values_opt = sweep_cmd->add_option("--values", values, "Comma-separated axis values")->delimiter(',');
  auto* logspace_opt =
      sweep_cmd->add_option("--logspace", logspace_spec, "START,STOP,COUNT log-spaced values")->delimiter(',');
  values_opt->excludes(logspace_opt);
  sweep_cmd->add_flag("--no-mc", no_mc, "Skip the Monte-Carlo columns");
  sweep_cmd->fallthrough();

  LhvParams lhv;
  std::string noise_name = "gaussian";
  std::string lhv_random = "0", lhv_shots = "10000", lhv_calibration = std::to_string(kMinCalibrationShots);
  auto* lhv_cmd = app.add_subcommand("lhv", "Check hidden-variable strategies against |<C>| <= 2");
  lhv_cmd->add_option("--strategy", lhv.strategy_files, "Strategy file (repeatable)");
  lhv_cmd->add_option("--random", lhv_random, "Number of random calibrated strategies");
  lhv_cmd->add_option("--shots", lhv_shots, "Shots per strategy");
  lhv_cmd->add_option("--hidden-states", lhv.hidden_states, "Hidden states for random and brute-force strategies");
  lhv_cmd->add_flag("--brute-force", lhv.brute_force, "Enumerate all deterministic strategies");
  lhv_cmd->add_option("--noise", noise_name, "Random strategy detector noise: none | gaussian | two_point");
  lhv_cmd->add_option("--noise-scale", lhv.noise_scale, "Random strategy noise scale");
  lhv_cmd->add_option("--max-invasiveness", lhv.max_invasiveness, "Random strategy invasiveness bound");
  lhv_cmd->add_option("--calibration-shots", lhv_calibration,
                      "Samples per hidden state for calibration flags (0 disables)");
  lhv_cmd->fallthrough();

  auto* verify = app.add_subcommand("verify", "Run the oracle cross-check suite");
  verify->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*simulate) {
      sim.config = resolve_config(global, sim_overrides);
      return cmd_simulate(sim, global, out, err);
    }
    if (*sweep_cmd) {
      sw.config = resolve_config(global, sweep_overrides);
      sw.axis = parse_sweep_axis(axis_name);
      if (!logspace_spec.empty()) {
        sw.values = logspace(logspace_spec);
      } else if (!values.empty()) {
        sw.values = values;
      } else {
        throw InvalidArgument("sweep needs --values or --logspace");
      }
      sw.monte_carlo = !no_mc;
      return cmd_sweep(sw, global, out);
    }
    if (*lhv_cmd) {
      lhv.noise = parse_noise_kind(noise_name);
      lhv.random_count = parse_count(lhv_random, "--random");
      lhv.shots = parse_count(lhv_shots, "--shots");
      lhv.calibration_shots = parse_count(lhv_calibration, "--calibration-shots");
      lhv.seed = resolve_seed(global, kDefaultSeed);
      return cmd_lhv(lhv, global, out);
    }
    if (*verify) return cmd_verify(global, out);
    if (!global.manifest_path.empty()) return replay(global, out, err);
    err << app.help();
    return kExitUsage;
  } catch (const ConfigParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace blgi::cli
