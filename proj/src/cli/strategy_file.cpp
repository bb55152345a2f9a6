#include "blgi/cli/strategy_file.hpp"

#include <map>
#include <sstream>

#include "blgi/errors.hpp"

namespace blgi::cli {

namespace {

std::vector<double> broadcast(const std::vector<double>& values, std::size_t n,
                              const std::string& field) {
  if (values.size() == n) return values;
  if (values.size() == 1) return std::vector<double>(n, values[0]);
  throw InvalidArgument(field + " needs 1 or " + std::to_string(n) + " values, got " +
                        std::to_string(values.size()));
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  return out;
}

}  // namespace

LhvStrategy parse_strategy(const ConfigDocument& doc) {
  std::map<std::string, std::string> strategy;
  std::map<std::string, std::string> noise[2];
  for (const auto& e : doc.entries) {
    if (e.section == "strategy") {
      strategy[e.key] = e.value;
    } else if (e.section == "noise1" || e.section == "noise2") {
      noise[e.section == "noise1" ? 0 : 1][e.key] = e.value;
    } else {
      throw InvalidArgument("unknown section [" + e.section + "] in strategy file");
    }
  }
  auto required = [&](const char* key) {
    auto it = strategy.find(key);
    if (it == strategy.end()) throw InvalidArgument(std::string("strategy.") + key + " is missing");
    return parse_real_list(it->second, std::string("strategy.") + key);
  };

  LhvStrategy s;
  s.prep = required("prep");
  const std::size_t n = s.prep.size();
  s.a1 = broadcast(required("a1"), n, "strategy.a1");
  s.a2 = broadcast(required("a2"), n, "strategy.a2");
  s.b1 = broadcast(required("b1"), n, "strategy.b1");
  s.b2 = broadcast(required("b2"), n, "strategy.b2");
  for (const auto& [key, value] : strategy) {
    if (key == "invasiveness1") {
      s.invasiveness1 = parse_real(value, "strategy.invasiveness1");
    } else if (key == "invasiveness2") {
      s.invasiveness2 = parse_real(value, "strategy.invasiveness2");
    } else if (key != "prep" && key != "a1" && key != "a2" && key != "b1" && key != "b2") {
      throw InvalidArgument("unknown key strategy." + key);
    }
  }

  for (int arm = 0; arm < 2; ++arm) {
    const std::string section = arm == 0 ? "noise1" : "noise2";
    NoiseKind kind = NoiseKind::none;
    std::vector<double> scale(n, 0.0);
    std::vector<double> bias(n, 0.0);
    for (const auto& [key, value] : noise[arm]) {
      const std::string field = section + "." + key;
      if (key == "kind") {
        kind = parse_noise_kind(value);
      } else if (key == "scale") {
        scale = broadcast(parse_real_list(value, field), n, field);
      } else if (key == "bias") {
        bias = broadcast(parse_real_list(value, field), n, field);
      } else {
        throw InvalidArgument("unknown key " + field);
      }
    }
    auto& models = arm == 0 ? s.noise1 : s.noise2;
    models.resize(n);
    for (std::size_t z = 0; z < n; ++z) models[z] = NoiseModel{kind, scale[z], bias[z]};
  }
  s.validate();
  return s;
}

LhvStrategy load_strategy(const std::string& path) {
  return parse_strategy(ConfigDocument::load(path));
}

std::string write_strategy(const LhvStrategy& s) {
  std::ostringstream os;
  os << "[strategy]\n"
     << "prep = " << join(s.prep) << "\n"
     << "a1 = " << join(s.a1) << "\n"
     << "a2 = " << join(s.a2) << "\n"
     << "b1 = " << join(s.b1) << "\n"
     << "b2 = " << join(s.b2) << "\n"
     << "invasiveness1 = " << format_real(s.invasiveness1) << "\n"
     << "invasiveness2 = " << format_real(s.invasiveness2) << "\n";
  for (int arm = 0; arm < 2; ++arm) {
    const auto& models = arm == 0 ? s.noise1 : s.noise2;
    std::vector<double> scale, bias;
    for (const auto& m : models) {
      scale.push_back(m.scale);
      bias.push_back(m.bias);
    }
    os << "\n[noise" << arm + 1 << "]\n"
       << "kind = " << to_string(models.empty() ? NoiseKind::none : models.front().kind) << "\n"
       << "scale = " << join(scale) << "\n"
       << "bias = " << join(bias) << "\n";
  }
  return os.str();
}

}  // namespace blgi::cli
