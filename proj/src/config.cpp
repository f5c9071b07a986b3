#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>

#include "hyplab/lab.hpp"
#include "lab_schema.hpp"

namespace hyplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

/// lo, lo + step, ... up to hi inclusive (within step / 1e6).
std::vector<double> expand_range(double lo, double hi, double step) {
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-6));
  char buf[32];
  for (long i = 0; i <= n; ++i) {
    // drop the last-digit noise of lo + i step
    std::snprintf(buf, sizeof buf, "%.15g", lo + i * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

KeySpec make(std::string key, ValueType type, ConfigValue fallback, std::string doc) {
  KeySpec k;
  k.key = std::move(key);
  k.type = type;
  k.fallback = std::move(fallback);
  k.doc = std::move(doc);
  return k;
}

KeySpec real(std::string key, double fallback, std::string doc, double lo = -kInf, double hi = kInf,
             bool lo_open = false) {
  KeySpec k = make(std::move(key), ValueType::real, fallback, std::move(doc));
  k.lo = lo;
  k.hi = hi;
  k.lo_open = lo_open;
  return k;
}
KeySpec positive(std::string key, double fallback, std::string doc, double hi = kInf) {
  return real(std::move(key), fallback, std::move(doc), 0.0, hi, true);
}
KeySpec integer(std::string key, long long fallback, std::string doc, double lo, double hi = kInf) {
  KeySpec k = make(std::move(key), ValueType::integer, fallback, std::move(doc));
  k.lo = lo;
  k.hi = hi;
  return k;
}
KeySpec boolean(std::string key, bool fallback, std::string doc) {
  return make(std::move(key), ValueType::boolean, fallback, std::move(doc));
}
KeySpec tag(std::string key, std::string fallback, std::vector<std::string> choices, std::string doc) {
  KeySpec k = make(std::move(key), ValueType::tag, std::move(fallback), std::move(doc));
  k.choices = std::move(choices);
  return k;
}
KeySpec reals(std::string key, std::vector<double> fallback, std::string doc, double lo = -kInf, double hi = kInf,
              bool lo_open = false) {
  KeySpec k = make(std::move(key), ValueType::reals, std::move(fallback), std::move(doc));
  k.lo = lo;
  k.hi = hi;
  k.lo_open = lo_open;
  return k;
}
KeySpec tags(std::string key, std::vector<std::string> fallback, std::vector<std::string> choices, std::string doc) {
  KeySpec k = make(std::move(key), ValueType::tags, std::move(fallback), std::move(doc));
  k.choices = std::move(choices);
  return k;
}
KeySpec when(KeySpec k, std::string key, std::string value) {
  k.when_key = std::move(key);
  k.when_value = std::move(value);
  return k;
}

std::vector<KeySpec> device_keys(bool with_bias) {
  std::vector<KeySpec> k{
      integer("device.n_cells", 64, "cells on [-1, 1]", 4, 1e6),
      positive("device.lambda", 0.15, "scaled Debye length"),
      positive("device.tau", kInf, "relaxation time; inf disables damping"),
      boolean("device.literal_damping", false, "augmented jump without the dx factor"),
      positive("device.cfl", 0.5, "Courant number", 1.0),
      integer("device.max_steps", 400000, "step budget of the steady run", 1),
      positive("device.tol", 1e-8, "steady residual threshold"),
  };
  if (with_bias) k.insert(k.begin() + 2, real("device.bias", 0.15, "applied bias V, phi(1) = -V"));
  return k;
}

std::vector<KeySpec> babenko_keys(int n_points) {
  return {
      positive("waterwave.amplitude", 0.1, "a / d", 0.75),
      integer("waterwave.n_points", n_points, "Fourier modes", 64, 1 << 20),
      real("waterwave.window", 0.0, "periodic window in units of d; 0 picks it from the tail decay", 0.0),
  };
}

std::vector<ScenarioSpec> build_schema() {
  std::vector<ScenarioSpec> s;
  const std::vector<std::string> both{"burgers", "traffic"};
  s.push_back({"scalar", "run", "Temple-form Godunov run; traffic selects the Bressan sensitivity demo",
               {
                   tag("scalar.flux", "burgers", both, "flux family"),
                   integer("scalar.n_cells", 200, "cells", 2, 1e7),
                   real("scalar.x_left", -1.0, "left end"),
                   real("scalar.x_right", 1.0, "right end"),
                   positive("scalar.t_end", 0.5, "final time"),
                   positive("scalar.cfl", 0.9, "Courant number", 1.0),
                   when(tag("scalar.initial", "riemann", {"riemann", "steady"}, "initial data"), "scalar.flux",
                        "burgers"),
                   when(real("scalar.u_left", 1.0, "Riemann left state"), "scalar.flux", "burgers"),
                   when(real("scalar.u_right", 0.0, "Riemann right state"), "scalar.flux", "burgers"),
                   when(real("scalar.x_jump", 0.0, "Riemann discontinuity"), "scalar.flux", "burgers"),
                   when(real("scalar.source", 0.0, "k in u_t + (u^2/2)_x = -k u", 0.0), "scalar.flux", "burgers"),
                   when(real("scalar.u_first", 3.0, "steady data: state in the first cell"), "scalar.flux",
                        "burgers"),
                   when(positive("scalar.a_left", 2.0, "lanes for x < 0"), "scalar.flux", "traffic"),
                   when(positive("scalar.a_right", 1.0, "lanes for x > 0"), "scalar.flux", "traffic"),
                   when(boolean("scalar.resonant", true, "left density at the resonant value"), "scalar.flux",
                        "traffic"),
                   when(real("scalar.density_left", 3.0, "left density when resonant = false", 0.0), "scalar.flux",
                        "traffic"),
                   when(real("scalar.density_right", 4.0, "right density", 0.0), "scalar.flux", "traffic"),
                   when(positive("scalar.delta", 1e-6, "perturbation subtracted on the left"), "scalar.flux",
                        "traffic"),
                   when(integer("scalar.snapshots", 5, "eigenvalue snapshots", 1, 1000), "scalar.flux", "traffic"),
               }});
  s.push_back({"device", "run", "steady Euler-Poisson device run from the rest state", device_keys(true)});
  {
    auto k = device_keys(false);
    k.push_back(reals("device.biases", {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3}, "bias sweep"));
    s.push_back({"device", "iv", "current-voltage sweep, one steady run per bias", k});
  }
  s.push_back({"vfp", "eigen", "eigenvalue table mu_{+-n}",
               {
                   real("vfp.u", 0.5, "drift"),
                   positive("vfp.kappa", 1.0, "diffusion"),
                   integer("vfp.n", 8, "largest n", 0, 64),
               }});
  s.push_back({"vfp", "relax", "periodic Burgers/VFP run on [0, 1]",
               {
                   positive("vfp.kappa", 1.0, "diffusion"),
                   integer("vfp.n_cells", 50, "cells", 4, 1e6),
                   integer("vfp.n_velocity", 32, "Gauss-Hermite ordinates (even)", 4, 200),
                   integer("vfp.n_modes", 8, "modes per sign in the cell basis", 1, 15),
                   boolean("vfp.reconstruct", true, "stationary edge traces in the transport"),
                   positive("vfp.t_end", 1.0, "final time"),
                   positive("vfp.cfl", 0.9, "Courant number", 1.0),
                   real("vfp.u_mean", 0.5, "u(x) = u_mean + u_amplitude sin(2 pi x)"),
                   real("vfp.u_amplitude", 0.3, "see u_mean"),
                   real("vfp.rho_amplitude", 0.5, "rho(x) = 1 + rho_amplitude cos(2 pi x)", 0.0, 1.0),
                   real("vfp.drift_amplitude", 0.2, "mean particle velocity drift_amplitude sin(4 pi x)"),
               }});
  s.push_back({"waterwave", "solitary", "Babenko solitary wave by Petviashvili iteration", babenko_keys(4096)});
  {
    auto k = babenko_keys(1024);
    k.push_back(positive("waterwave.t_end", 10.0, "duration in units of sqrt(d / g)"));
    k.push_back(positive("waterwave.courant", 0.1, "RK4 Courant number", 1.0));
    k.push_back(integer("waterwave.snapshots", 11, "equally spaced diagnostics including t = 0", 2, 100000));
    s.push_back({"waterwave", "evolve", "conformal Euler run of the Babenko wave", k});
  }
  const auto alpha = [] {
    KeySpec k = real("serre.alpha", 1.2, "eSGN parameter", 1.0);
    k.constraint = "alpha ≥ 1";
    return k;
  };
  s.push_back({"serre", "dispersion", "linear phase speed of eSGN against the exact relation",
               {
                   alpha(),
                   reals("serre.kd", expand_range(0.01, 3.0, 0.01), "kd samples, list or lo:hi:step", 0.0),
               }});
  s.push_back({"serre", "solitary", "SGN / eSGN solitary profile",
               {
                   tag("serre.model", "esgn", {"sgn", "esgn"}, "model"),
                   alpha(),
                   positive("serre.amplitude", 0.1, "a / d"),
                   integer("serre.n_points", 1024, "samples", 16, 1 << 20),
               }});
  s.push_back({"serre", "sweep", "speed-amplitude table",
               {
                   reals("serre.amplitudes", {0.1, 0.45, 0.7}, "a / d values", 0.0, kInf, true),
                   tags("serre.models", {"sgn", "euler", "esgn"}, {"sgn", "euler", "esgn"}, "rows"),
                   alpha(),
               }});
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  return std::all_of(k.begin(), k.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; });
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !std::isnan(out);
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

std::vector<std::string> split_sequence(const std::string& raw, bool& ok) {
  std::string body = raw;
  ok = true;
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') {
      ok = false;
      return {};
    }
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  if (trim(body).empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(unquote(trim(item)));
  return items;
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::boolean: return "boolean";
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::tag: return "tag";
    case ValueType::reals: return "sequence of reals";
    case ValueType::tags: return "sequence of tags";
  }
  return "?";
}

// Shortest text that parses back to the same double.
std::string short_number(double x) {
  char buf[40];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
}

std::string range_text(const KeySpec& k) {
  if (!k.constraint.empty()) return k.constraint;
  const std::string name = k.key.substr(k.key.rfind('.') + 1);
  std::vector<std::string> parts;
  if (k.lo > -kInf) parts.push_back(name + (k.lo_open ? " > " : " ≥ ") + short_number(k.lo));
  if (k.hi < kInf) parts.push_back(name + " ≤ " + short_number(k.hi));
  return join(parts, " and ");
}

bool in_range(const KeySpec& k, double x) {
  if (std::isnan(x)) return false;
  if (k.lo_open ? !(x > k.lo) : !(x >= k.lo)) return false;
  return x <= k.hi;
}

std::optional<ConfigValue> convert(const KeySpec& k, const std::string& raw, std::string& err) {
  switch (k.type) {
    case ValueType::boolean:
      if (raw == "true") return ConfigValue(true);
      if (raw == "false") return ConfigValue(false);
      err = "type mismatch: expected boolean (true/false), got '" + raw + "'";
      return std::nullopt;
    case ValueType::integer: {
      long long v;
      if (!parse_int(raw, v)) {
        err = "type mismatch: expected integer, got '" + raw + "'";
        return std::nullopt;
      }
      if (!in_range(k, static_cast<double>(v))) {
        err = "constraint violated: " + range_text(k);
        return std::nullopt;
      }
      return ConfigValue(v);
    }
    case ValueType::real: {
      double v;
      if (!parse_double(raw, v)) {
        err = "type mismatch: expected real, got '" + raw + "'";
        return std::nullopt;
      }
      if (!in_range(k, v)) {
        err = "constraint violated: " + range_text(k);
        return std::nullopt;
      }
      return ConfigValue(v);
    }
    case ValueType::tag: {
      const std::string v = unquote(raw);
      if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
        err = "invalid tag '" + v + "', expected one of: " + join(k.choices);
        return std::nullopt;
      }
      return ConfigValue(v);
    }
    case ValueType::reals: {
      bool ok;
      const auto items = split_sequence(raw, ok);
      std::vector<double> out;
      if (!ok) {
        err = "type mismatch: unterminated sequence";
        return std::nullopt;
      }
      double lo, hi, step;
      if (items.size() == 1 && std::sscanf(items[0].c_str(), "%lf:%lf:%lf", &lo, &hi, &step) == 3) {
        if (!(step > 0) || !(hi >= lo) || (hi - lo) / step > 1e7) {
          err = "invalid range '" + items[0] + "', expected lo:hi:step with step > 0 and hi ≥ lo";
          return std::nullopt;
        }
        out = expand_range(lo, hi, step);
        for (double v : out)
          if (!in_range(k, v)) {
            err = "constraint violated: every element " + range_text(k);
            return std::nullopt;
          }
        return ConfigValue(out);
      }
      for (const auto& it : items) {
        double v;
        if (!parse_double(it, v)) {
          err = "type mismatch: expected real in sequence, got '" + it + "'";
          return std::nullopt;
        }
        if (!in_range(k, v)) {
          err = "constraint violated: every element " + range_text(k);
          return std::nullopt;
        }
        out.push_back(v);
      }
      if (out.empty()) {
        err = "sequence must not be empty";
        return std::nullopt;
      }
      return ConfigValue(out);
    }
    case ValueType::tags: {
      bool ok;
      const auto items = split_sequence(raw, ok);
      if (!ok || items.empty()) {
        err = ok ? "sequence must not be empty" : "type mismatch: unterminated sequence";
        return std::nullopt;
      }
      for (const auto& it : items)
        if (std::find(k.choices.begin(), k.choices.end(), it) == k.choices.end()) {
          err = "invalid tag '" + it + "', expected one of: " + join(k.choices);
          return std::nullopt;
        }
      return ConfigValue(items);
    }
  }
  return std::nullopt;
}

std::string format_value(const ConfigValue& v) {
  struct {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return short_number(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const std::vector<double>& v) const {
      std::vector<std::string> p;
      for (double d : v) p.push_back(short_number(d));
      return "[" + join(p) + "]";
    }
    std::string operator()(const std::vector<std::string>& v) const { return "[" + join(v) + "]"; }
  } f;
  return std::visit(f, v);
}

// Long evenly spaced lists read better as lo:hi:step.
std::string reference_value(const ConfigValue& v) {
  const auto* r = std::get_if<std::vector<double>>(&v);
  if (!r || r->size() < 8) return format_value(v);
  const double step = (*r)[1] - (*r)[0];
  for (std::size_t i = 1; i < r->size(); ++i)
    if (std::abs((*r)[i] - (*r)[i - 1] - step) > 1e-9 * std::abs(step)) return format_value(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", step);
  return short_number(r->front()) + ":" + short_number(r->back()) + ":" + buf;
}

struct RawEntry {
  std::string value;
  std::string where;
};

void read_lines(const std::string& text, const std::string& origin, bool allow_replace,
                std::map<std::string, RawEntry>& raw, std::vector<ConfigIssue>& issues) {
  std::stringstream ss(text);
  std::string line;
  int no = 0;
  while (std::getline(ss, line)) {
    ++no;
    const std::string where = origin + " " + std::to_string(no);
    bool quoted = false;
    char q = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == q) quoted = false;
      } else if (c == '"' || c == '\'') {
        quoted = true;
        q = c;
      } else if (c == '#') {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({where, "syntax error: expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      issues.push_back({where, "syntax error: invalid key '" + key + "'"});
      continue;
    }
    if (value.empty()) {
      issues.push_back({key, "missing value (" + where + ")"});
      continue;
    }
    if (!allow_replace && raw.count(key)) {
      issues.push_back({key, "duplicate key (" + where + ", first at " + raw[key].where + ")"});
      continue;
    }
    raw[key] = {value, where};
  }
}

}  // namespace

const std::vector<ScenarioSpec>& scenario_schema() {
  static const std::vector<ScenarioSpec> s = build_schema();
  return s;
}

const ScenarioSpec* find_scenario(const std::string& module, const std::string& command) {
  for (const auto& s : scenario_schema())
    if (s.module == module && (command.empty() || s.command == command)) return &s;
  return nullptr;
}

ConfigErrors::ConfigErrors(std::vector<ConfigIssue> issues)
    : ConfigError([&] {
        std::string m = std::to_string(issues.size()) + " configuration error(s)";
        for (const auto& i : issues) m += "\n  " + i.path + ": " + i.message;
        return m;
      }()),
      issues_(std::move(issues)) {}

namespace {

template <typename T>
const T& lookup(const std::map<std::string, ConfigValue>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw ConfigError("no parameter '" + key + "' in this scenario");
  if (const T* v = std::get_if<T>(&it->second)) return *v;
  throw ConfigError("parameter '" + key + "' has another type");
}

}  // namespace

bool ScenarioConfig::flag(const std::string& key) const { return lookup<bool>(parameters, key); }
long long ScenarioConfig::integer(const std::string& key) const { return lookup<long long>(parameters, key); }
double ScenarioConfig::real(const std::string& key) const { return lookup<double>(parameters, key); }
const std::string& ScenarioConfig::tag(const std::string& key) const { return lookup<std::string>(parameters, key); }
const std::vector<double>& ScenarioConfig::reals(const std::string& key) const {
  return lookup<std::vector<double>>(parameters, key);
}
const std::vector<std::string>& ScenarioConfig::tags(const std::string& key) const {
  return lookup<std::vector<std::string>>(parameters, key);
}

std::string ScenarioConfig::resolved_text() const {
  std::string out = "module = " + module + "\ncommand = " + command + "\n";
  for (const auto& [k, v] : parameters) out += k + " = " + format_value(v) + "\n";
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, RawEntry> raw;
  read_lines(text, "line", false, raw, issues);
  for (std::size_t i = 0; i < overrides.size(); ++i)
    read_lines(overrides[i], "override", true, raw, issues);

  ScenarioConfig c;
  auto take = [&](const std::string& k) {
    auto it = raw.find(k);
    if (it == raw.end()) return std::string();
    std::string v = unquote(it->second.value);
    raw.erase(it);
    return v;
  };
  c.module = take("module");
  c.command = take("command");
  if (auto out = take("output"); !out.empty()) c.output = out;

  std::vector<std::string> modules;
  for (const auto& s : scenario_schema())
    if (std::find(modules.begin(), modules.end(), s.module) == modules.end()) modules.push_back(s.module);
  if (c.module.empty()) {
    issues.push_back({"module", "missing; expected one of: " + join(modules)});
    throw ConfigErrors(issues);
  }
  const ScenarioSpec* spec = find_scenario(c.module, c.command);
  if (!spec) {
    if (std::find(modules.begin(), modules.end(), c.module) == modules.end()) {
      issues.push_back({"module", "unknown module '" + c.module + "', expected one of: " + join(modules)});
    } else {
      std::vector<std::string> cmds;
      for (const auto& s : scenario_schema())
        if (s.module == c.module) cmds.push_back(s.command);
      issues.push_back({"command", "unknown command '" + c.command + "' for " + c.module + ", expected one of: " +
                                       join(cmds)});
    }
    throw ConfigErrors(issues);
  }
  c.command = spec->command;

  // Keys whose applicability depends on another key are resolved after it.
  std::map<std::string, ConfigValue> values;
  std::vector<std::string> extraneous;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& k : spec->keys) {
      if (k.when_key.empty() != (pass == 0)) continue;
      bool applicable = true;
      if (!k.when_key.empty()) {
        auto it = values.find(k.when_key);
        applicable = it != values.end() && std::get<std::string>(it->second) == k.when_value;
      }
      auto it = raw.find(k.key);
      if (!applicable) {
        if (it != raw.end()) {
          extraneous.push_back(k.key);
          raw.erase(it);
        }
        continue;
      }
      if (it == raw.end()) {
        values[k.key] = k.fallback;
        continue;
      }
      std::string err;
      if (auto v = convert(k, it->second.value, err)) {
        values[k.key] = *v;
      } else {
        issues.push_back({k.key, err});
        values[k.key] = k.fallback;
      }
      raw.erase(it);
    }
  }
  for (const auto& [k, e] : raw) extraneous.push_back(k);
  for (const auto& k : extraneous) {
    std::string hint;
    for (const auto& spec_key : spec->keys)
      if (spec_key.key == k && !spec_key.when_key.empty())
        hint = " (only valid when " + spec_key.when_key + " = " + spec_key.when_value + ")";
    issues.push_back({k, "unknown key for " + c.module + " " + c.command + hint});
  }

  c.parameters = values;
  auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) issues.push_back({key, "constraint violated: " + msg});
  };
  if (issues.empty()) {
    if (c.module == "scalar") check(c.real("scalar.x_right") > c.real("scalar.x_left"), "scalar.x_right",
                                    "x_right > x_left");
    if (c.module == "vfp" && c.command == "relax")
      check(c.integer("vfp.n_velocity") % 2 == 0, "vfp.n_velocity", "n_velocity even");
  }
  if (!issues.empty()) throw ConfigErrors(issues);
  c.hash = fnv1a_hex(c.resolved_text());
  return c;
}

std::string config_reference() {
  std::string out;
  for (const auto& s : scenario_schema()) {
    out += "### `" + s.module + " " + s.command + "`\n\n" + s.doc + ".\n\n";
    out += "| key | type | default | constraint | meaning |\n|---|---|---|---|---|\n";
    for (const auto& k : s.keys) {
      std::string c = range_text(k);
      if (!k.choices.empty()) c = join(k.choices, " \\| ");
      if (!k.when_key.empty()) c += (c.empty() ? "" : "; ") + std::string("only if ") + k.when_key + " = " + k.when_value;
      out += "| `" + k.key + "` | " + type_name(k.type) + " | `" + reference_value(k.fallback) + "` | " + c + " | " +
             k.doc + " |\n";
    }
    out += "\n";
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace hyplab
