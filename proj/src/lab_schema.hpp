#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hyplab/lab.hpp"

namespace hyplab {

struct KeySpec {
  std::string key;
  ValueType type;
  ConfigValue fallback;
  std::string doc;
  std::vector<std::string> choices;  // tags
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  std::string constraint;  // overrides the generated range text
  std::string when_key, when_value;  // key only exists when when_key == when_value
};

struct ScenarioSpec {
  std::string module, command, doc;
  std::vector<KeySpec> keys;
};

const std::vector<ScenarioSpec>& scenario_schema();
/// Empty command selects the module's first scenario.
const ScenarioSpec* find_scenario(const std::string& module, const std::string& command);

}  // namespace hyplab
