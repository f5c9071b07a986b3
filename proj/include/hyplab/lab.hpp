#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hyplab/errors.hpp"

namespace hyplab {

inline constexpr const char* kToolVersion = "0.1.0";

using ConfigValue = std::variant<bool, long long, double, std::string, std::vector<double>, std::vector<std::string>>;

enum class ValueType { boolean, integer, real, tag, reals, tags };

struct ConfigIssue {
  std::string path;  // dotted key, or "line N" for syntax errors
  std::string message;
};

/// Every problem found while parsing, not just the first.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// module + command select a scenario; parameters hold every documented key
/// with defaults filled in.
struct ScenarioConfig {
  std::string module;
  std::string command;
  std::map<std::string, ConfigValue> parameters;
  std::string output = "hyplab-out";
  std::string version = kToolVersion;
  std::string hash;  // FNV-1a of resolved_text()

  bool flag(const std::string& key) const;
  long long integer(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& tag(const std::string& key) const;
  const std::vector<double>& reals(const std::string& key) const;
  const std::vector<std::string>& tags(const std::string& key) const;

  /// Sorted `key = value` lines; parse_config(resolved_text()) round-trips.
  std::string resolved_text() const;
};

/// Flat `key = value` lines with dotted sections, '#' comments, sequences in
/// brackets. Overrides are further lines applied after the text and may
/// replace its keys.
ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Markdown table of every scenario and key with type, default and constraint.
std::string config_reference();

std::string fnv1a_hex(const std::string& bytes);
/// printf %.17g.
std::string csv_number(double x);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  int status = 0;  // 0 ok, 1 numerical failure
  std::vector<Artifact> artifacts;
  std::string summary_json;
  std::string error_json;
  double wall_time = 0.0;
  std::string console;  // short human-readable report
};

/// Runs the scenario and writes artifacts plus manifest.json into
/// config.output. On a numerical failure only error.json is written.
RunResult run(const ScenarioConfig& config);
/// As run() without touching the filesystem.
RunResult run_in_memory(const ScenarioConfig& config);

/// {"kind": ..., "message": ..., "issues": [...]}.
std::string error_json(const Error& e);

}  // namespace hyplab
