#pragma once

// Flat `key = value` configuration text with `[section]` headers.
// `#` and `;` start comments. Values may be comma-separated lists.

#include <stdexcept>
#include <string>
#include <vector>

#include "blgi/protocol.hpp"

namespace blgi::cli {

/// Syntax error with a 1-based position.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(const std::string& source, int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
  int value_column = 0;
};

struct ConfigDocument {
  std::string source;
  std::vector<ConfigEntry> entries;

  static ConfigDocument parse(const std::string& text, const std::string& source = "<config>");
  static ConfigDocument load(const std::string& path);
};

/// Parses a real number, also accepting multiples of pi such as `3*pi/4`,
/// `pi/2` or `-pi`. Throws InvalidArgument naming `field`.
double parse_real(const std::string& text, const std::string& field);
std::uint64_t parse_count(const std::string& text, const std::string& field);
std::vector<double> parse_real_list(const std::string& text, const std::string& field);

/// Applies the document on top of `base`. Sections: meter1, meter2, meters
/// (both arms), b, angles, run.
ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig base = {});

/// Serializes with 17 significant digits so that reloading is exact.
std::string write_config(const ExperimentConfig& config);

/// Formats a double with 17 significant digits in the classic locale.
std::string format_real(double value);

}  // namespace blgi::cli
