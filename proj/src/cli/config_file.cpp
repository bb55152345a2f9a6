#include "blgi/cli/config_file.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "blgi/errors.hpp"

namespace blgi::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_plain(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

template <typename Spec>
Spec& meter_as(WeakMeterSpec& meter, const std::string& field) {
  if (auto* s = std::get_if<Spec>(&meter)) return *s;
  throw InvalidArgument(field + " does not apply to this meter type");
}

bool accepts_key(const WeakMeterSpec& meter, const std::string& key) {
  if (std::holds_alternative<GaussianMeterSpec>(meter)) return key == "sigma" || key == "eta";
  return key == "v_total" || key == "u";
}

void set_meter_field(WeakMeterSpec& meter, const std::string& key, const std::string& value,
                     const std::string& field) {
  if (key == "type") {
    if (value == "gaussian") {
      if (!std::holds_alternative<GaussianMeterSpec>(meter)) meter = GaussianMeterSpec{};
    } else if (value == "ancilla") {
      if (!std::holds_alternative<AncillaMeterSpec>(meter)) meter = AncillaMeterSpec{};
    } else {
      throw InvalidArgument(field + " must be 'gaussian' or 'ancilla', got '" + value + "'");
    }
  } else if (key == "sigma") {
    meter_as<GaussianMeterSpec>(meter, field).sigma = parse_real(value, field);
  } else if (key == "eta") {
    meter_as<GaussianMeterSpec>(meter, field).eta = parse_real(value, field);
  } else if (key == "v_total") {
    meter_as<AncillaMeterSpec>(meter, field).v_total = parse_real(value, field);
  } else if (key == "u") {
    meter_as<AncillaMeterSpec>(meter, field).u = parse_real(value, field);
  } else {
    throw InvalidArgument("unknown key " + field);
  }
}

void write_meter(std::ostringstream& os, const char* name, const WeakMeterSpec& meter) {
  os << "[" << name << "]\n";
  if (const auto* g = std::get_if<GaussianMeterSpec>(&meter)) {
    os << "type = gaussian\n"
       << "sigma = " << format_real(g->sigma) << "\n"
       << "eta = " << format_real(g->eta) << "\n";
  } else {
    const auto& a = std::get<AncillaMeterSpec>(meter);
    os << "type = ancilla\n"
       << "v_total = " << format_real(a.v_total) << "\n"
       << "u = " << format_real(a.u) << "\n";
  }
  os << "\n";
}

}  // namespace

ConfigParseError::ConfigParseError(const std::string& source, int line, int column,
                                   const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  doc.source = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    const int column = static_cast<int>(start) + 1;

    if (line[start] == '[') {
      const auto close = line.find(']', start);
      if (close == std::string::npos) {
        throw ConfigParseError(source, line_no, column, "unterminated section header");
      }
      if (!trim(line.substr(close + 1)).empty()) {
        throw ConfigParseError(source, line_no, static_cast<int>(close) + 2,
                               "unexpected text after section header");
      }
      section = trim(line.substr(start + 1, close - start - 1));
      if (section.empty()) throw ConfigParseError(source, line_no, column, "empty section name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError(source, line_no, column, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigParseError(source, line_no, column, "missing key before '='");
    for (char ch : key) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '-')) {
        throw ConfigParseError(source, line_no, column, "invalid character in key '" + key + "'");
      }
    }
    const std::string value = trim(line.substr(eq + 1));
    const auto value_start = line.find_first_not_of(" \t", eq + 1);
    const int value_column =
        value_start == std::string::npos ? static_cast<int>(eq) + 2 : static_cast<int>(value_start) + 1;
    if (value.empty()) {
      throw ConfigParseError(source, line_no, value_column, "missing value for '" + key + "'");
    }
    doc.entries.push_back({section, key, value, line_no, value_column});
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

double parse_real(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  double value = 0.0;
  if (parse_plain(text, value)) {
    if (!std::isfinite(value)) throw InvalidArgument(field + " must be finite");
    return value;
  }
  // [sign][k[*]]pi[/d]
  const auto pi_at = text.find("pi");
  if (pi_at != std::string::npos) {
    std::string head = trim(text.substr(0, pi_at));
    std::string tail = trim(text.substr(pi_at + 2));
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    double factor = 1.0;
    bool ok = true;
    if (head == "-") {
      factor = -1.0;
    } else if (!head.empty() && head != "+") {
      ok = parse_plain(head, factor);
    }
    double divisor = 1.0;
    if (ok && !tail.empty()) {
      ok = tail.front() == '/' && parse_plain(trim(tail.substr(1)), divisor) && divisor != 0.0;
    }
    if (ok) return factor * std::numbers::pi / divisor;
  }
  throw InvalidArgument(field + ": cannot parse '" + text + "' as a number");
}

std::uint64_t parse_count(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size()) return value;
  // Accept exact scientific forms such as 1e6.
  double real = 0.0;
  if (parse_plain(text, real) && real >= 0.0 && real < 1.8e19 && std::floor(real) == real) {
    return static_cast<std::uint64_t>(real);
  }
  throw InvalidArgument(field + ": '" + text + "' is not a non-negative integer");
}

std::vector<double> parse_real_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) throw InvalidArgument(field + ": empty list element");
    out.push_back(parse_real(item, field));
  }
  if (out.empty()) throw InvalidArgument(field + ": empty list");
  return out;
}

ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig base) {
  // Meter types first so that the type-specific keys land on the right variant.
  for (const auto& e : doc.entries) {
    if (e.key != "type") continue;
    const std::string field = e.section + "." + e.key;
    if (e.section == "meter1" || e.section == "meters") set_meter_field(base.meter1, e.key, e.value, field);
    if (e.section == "meter2" || e.section == "meters") set_meter_field(base.meter2, e.key, e.value, field);
  }
  for (const auto& e : doc.entries) {
    const std::string field = e.section.empty() ? e.key : e.section + "." + e.key;
    if (e.section == "meter1" || e.section == "meter2" || e.section == "meters") {
      if (e.key == "type") continue;
      if (e.section == "meters") {
        // Shared keys land on every arm whose meter type has them.
        bool applied = false;
        for (WeakMeterSpec* m : {&base.meter1, &base.meter2}) {
          if (!accepts_key(*m, e.key)) continue;
          set_meter_field(*m, e.key, e.value, field);
          applied = true;
        }
        if (!applied) set_meter_field(base.meter1, e.key, e.value, field);  // throws with the reason
      } else {
        set_meter_field(e.section == "meter1" ? base.meter1 : base.meter2, e.key, e.value, field);
      }
    } else if (e.section == "b") {
      if (e.key != "v") throw InvalidArgument("unknown key " + field);
      base.b_spec.v = parse_real(e.value, field);
    } else if (e.section == "angles") {
      double* slot = e.key == "a1"   ? &base.angles.a1
                     : e.key == "a2" ? &base.angles.a2
                     : e.key == "b1" ? &base.angles.b1
                     : e.key == "b2" ? &base.angles.b2
                                     : nullptr;
      if (!slot) throw InvalidArgument("unknown key " + field);
      *slot = parse_real(e.value, field);
    } else if (e.section == "run") {
      if (e.key == "shots") {
        base.shots = parse_count(e.value, field);
      } else if (e.key == "seed") {
        base.seed = parse_count(e.value, field);
      } else {
        throw InvalidArgument("unknown key " + field);
      }
    } else {
      throw InvalidArgument("unknown section [" + e.section + "] (key " + e.key + ")");
    }
  }
  return base;
}

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string write_config(const ExperimentConfig& config) {
  std::ostringstream os;
  write_meter(os, "meter1", config.meter1);
  write_meter(os, "meter2", config.meter2);
  os << "[b]\nv = " << format_real(config.b_spec.v) << "\n\n";
  os << "[angles]\n"
     << "a1 = " << format_real(config.angles.a1) << "\n"
     << "a2 = " << format_real(config.angles.a2) << "\n"
     << "b1 = " << format_real(config.angles.b1) << "\n"
     << "b2 = " << format_real(config.angles.b2) << "\n\n";
  os << "[run]\nshots = " << config.shots << "\nseed = " << config.seed << "\n";
  return os.str();
}

}  // namespace blgi::cli
