#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hyplab/lab.hpp"

namespace {

struct ModuleArgs {
  std::string config_file;
  std::vector<std::string> sets;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw hyplab::ConfigErrors({{"--config", "cannot read '" + path + "'"}});
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Leftover tokens: an optional leading command, then `--key value` or
/// `--key=value` pairs that become `module.key = value`.
std::vector<std::string> inline_overrides(const std::string& module, std::vector<std::string> rest) {
  std::vector<std::string> out;
  std::vector<hyplab::ConfigIssue> issues;
  std::size_t i = 0;
  if (!rest.empty() && rest[0].rfind("-", 0) != 0) out.push_back("command = " + rest[i++]);
  for (; i < rest.size(); ++i) {
    std::string tok = rest[i];
    if (tok.rfind("--", 0) != 0 || tok.size() < 3) {
      issues.push_back({tok, "unexpected argument"});
      continue;
    }
    tok = tok.substr(2);
    std::string value;
    if (auto eq = tok.find('='); eq != std::string::npos) {
      value = tok.substr(eq + 1);
      tok = tok.substr(0, eq);
    } else if (i + 1 < rest.size()) {
      value = rest[++i];
    } else {
      issues.push_back({"--" + tok, "missing value"});
      continue;
    }
    std::replace(tok.begin(), tok.end(), '-', '_');
    if (tok.find('.') == std::string::npos) tok = module + "." + tok;
    out.push_back(tok + " = " + value);
  }
  if (!issues.empty()) throw hyplab::ConfigErrors(issues);
  return out;
}

int execute(const std::string& module, const ModuleArgs& a, const std::vector<std::string>& rest,
            const std::string& out_dir) {
  try {
    const std::string text = a.config_file.empty() ? std::string() : read_file(a.config_file);
    std::vector<std::string> overrides{"module = " + module};
    for (auto& o : inline_overrides(module, rest)) overrides.push_back(o);
    for (const auto& s : a.sets) {
      const auto eq = s.find('=');
      overrides.push_back(eq == std::string::npos ? s : s.substr(0, eq) + " = " + s.substr(eq + 1));
    }
    if (!out_dir.empty()) overrides.push_back("output = " + out_dir);
    const hyplab::ScenarioConfig cfg = hyplab::parse_config(text, overrides);
    const hyplab::RunResult r = hyplab::run(cfg);
    if (r.status) {
      std::cerr << r.error_json;
      return 1;
    }
    std::cout << r.console << "wrote " << r.artifacts.size() + 1 << " files to " << cfg.output << "\n";
    return 0;
  } catch (const hyplab::ConfigError& e) {
    std::cerr << hyplab::error_json(e);
    return 2;
  } catch (const hyplab::Error& e) {
    std::cerr << hyplab::error_json(e);
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for hyperbolic and dispersive models"};
  app.set_version_flag("--version", std::string(hyplab::kToolVersion));
  app.require_subcommand(1);
  std::string out_dir;
  app.add_option("--out", out_dir, "output directory")->type_name("DIR");

  app.add_subcommand("reference", "print every scenario key as a markdown table");
  const std::vector<std::pair<std::string, std::string>> modules{
      {"scalar", "Temple-form well-balanced Godunov runs (burgers, traffic)"},
      {"device", "Euler-Poisson device: run, iv"},
      {"vfp", "Vlasov-Fokker-Planck: eigen, relax"},
      {"waterwave", "conformal Euler water waves: solitary, evolve"},
      {"serre", "SGN / eSGN: dispersion, solitary, sweep"},
  };
  std::map<std::string, ModuleArgs> args;
  for (const auto& [name, doc] : modules) {
    auto* sub = app.add_subcommand(name, doc + "; further --key value pairs set " + name + ".key");
    sub->allow_extras();
    sub->add_option("--config", args[name].config_file, "key = value file")->type_name("FILE");
    sub->add_option("--set", args[name].sets, "override, key=value (repeatable)")->type_name("KEY=VALUE");
    sub->add_option("--out", out_dir, "output directory")->type_name("DIR");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << hyplab::error_json(hyplab::ConfigErrors(std::vector<hyplab::ConfigIssue>{{"argv", e.what()}}));
    return 2;
  }
  if (app.got_subcommand("reference")) {
    std::cout << hyplab::config_reference();
    return 0;
  }
  for (const auto& [name, doc] : modules)
    if (auto* sub = app.get_subcommand(name); sub->parsed()) return execute(name, args[name], sub->remaining(), out_dir);
  return 2;
}
