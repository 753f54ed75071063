#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dfrc/driver.hpp"

namespace dfrc {

/// Everything a CLI run needs: the single-run configuration plus the
/// experiment lists that drive `converge` and `sweep`.
struct ExperimentConfig {
  RunConfig run;
  int realizations = 20;
  std::vector<double> alphas;
  std::vector<double> sweep_powers;  // linear P0 values
  std::vector<int> sweep_radar_antennas;
  std::vector<std::pair<int, int>> sweep_irs;  // (rows, cols)

  bool operator==(const ExperimentConfig& other) const;
};

class ConfigError : public Error {
 public:
  enum class Kind { MissingKey, UnknownKey, BadValue, Syntax, Io };

  ConfigError(Kind kind, std::string key, int line, const std::string& detail);

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  /// 1-based line in the config file; 0 for command-line overrides.
  int line() const { return line_; }

  static const char* kind_name(Kind kind);

 private:
  Kind kind_;
  std::string key_;
  int line_;
};

/// Built-in presets. "table1" carries the published simulation parameters.
ExperimentConfig preset(const std::string& name);

/// Parses flat `key = value` text (`#` starts a comment). A `preset = NAME`
/// line makes every other key optional; without it all keys are required.
/// Keys with a `_db` twin accept either form; if both appear they must agree.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Complete, linear-unit config text; parse_config_text(print_config(c)) == c.
std::string print_config(const ExperimentConfig& cfg);

/// Resolved key/value pairs in print order, for manifests.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

}  // namespace dfrc
