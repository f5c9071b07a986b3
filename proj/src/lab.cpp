#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "hyplab/euler_poisson.hpp"
#include "hyplab/lab.hpp"
#include "hyplab/scalar_wb.hpp"
#include "hyplab/serre.hpp"
#include "hyplab/vfp.hpp"
#include "hyplab/waterwave.hpp"

namespace hyplab {

using nlohmann::json;

namespace {

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

/// Columns are `name[unit]`; every quantity here is scaled, unit "1" or a
/// reference scale such as d.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
  }
  Csv& operator<<(double x) { return cell(csv_number(x)); }
  Csv& operator<<(long long x) { return cell(std::to_string(x)); }
  Csv& operator<<(int x) { return cell(std::to_string(x)); }
  Csv& operator<<(long x) { return cell(std::to_string(x)); }
  Csv& operator<<(bool x) { return cell(x ? "1" : "0"); }
  Csv& operator<<(const std::string& s) { return cell(s); }
  void end() {
    text_ += "\n";
    first_ = true;
  }
  const std::string& str() const { return text_; }

 private:
  Csv& cell(const std::string& s) {
    text_ += (first_ ? "" : ",") + s;
    first_ = false;
    return *this;
  }
  std::string text_;
  bool first_ = true;
};

struct Outputs {
  std::vector<Artifact> files;
  json summary = json::object();
  std::string console;

  void add(const std::string& name, const Csv& csv) { files.push_back({name, csv.str()}); }
};

using Runner = std::function<void(const ScenarioConfig&, Outputs&)>;

void scalar_run(const ScenarioConfig& c, Outputs& out) {
  const double xl = c.real("scalar.x_left"), xr = c.real("scalar.x_right"), t_end = c.real("scalar.t_end");
  const int n = static_cast<int>(c.integer("scalar.n_cells"));
  if (c.tag("scalar.flux") == "traffic") {
    BressanOptions o;
    o.n_cells = n;
    o.x_left = xl;
    o.x_right = xr;
    o.t_end = t_end;
    o.cfl = c.real("scalar.cfl");
    o.delta = c.real("scalar.delta");
    o.snapshots = static_cast<int>(c.integer("scalar.snapshots"));
    const double aL = c.real("scalar.a_left"), aR = c.real("scalar.a_right");
    const double uL = c.flag("scalar.resonant") ? bressan_resonant_left_state(aL, aR) : c.real("scalar.density_left");
    const double uR = c.real("scalar.density_right");
    const BressanReport r = bressan_demo(aL, aR, [&](double x) { return x < 0 ? uL : uR; }, o);
    Csv csv({"x[1]", "a[1]", "u_base[1]", "u_perturbed[1]", "eigenvalue[1]"});
    for (Eigen::Index j = 0; j < r.x.size(); ++j) {
      csv << r.x[j] << r.a[j] << r.u_base[j] << r.u_perturbed[j] << r.eigenvalues.back()[j];
      csv.end();
    }
    out.add("scalar_bressan.csv", csv);
    out.summary = {{"left_state", uL},
                   {"initial_distance", r.initial_distance},
                   {"final_distance", r.final_distance},
                   {"sensitivity", r.sensitivity},
                   {"l1_sensitivity", r.l1_sensitivity},
                   {"min_abs_eigenvalue", r.min_abs_eigenvalue},
                   {"steps", r.steps}};
    out.console = "sensitivity ratio " + csv_number(r.sensitivity) + " (max norm), " + csv_number(r.l1_sensitivity) +
                  " (L1)\n";
    return;
  }
  ScalarLaw law = ScalarLaw::burgers();
  const double k = c.real("scalar.source");
  if (k > 0) {
    law.source = [](double u) { return -u; };
    law.source_coefficient = [k](double) { return k; };
  }
  StepOptions so;
  so.cfl = c.real("scalar.cfl");
  TempleState s0 = [&] {
    if (c.tag("scalar.initial") == "steady") return chained_steady_state(xl, xr, n, c.real("scalar.u_first"), law);
    const double a = c.real("scalar.u_left"), b = c.real("scalar.u_right"), xj = c.real("scalar.x_jump");
    return make_temple_state(xl, xr, n, [=](double x) { return x < xj ? a : b; }, law);
  }();
  const TempleState s = run_to(s0, law, t_end, so);
  Csv csv({"x[1]", "a[1]", "u[1]", "u_initial[1]"});
  for (Eigen::Index j = 0; j < s.x.size(); ++j) {
    csv << s.x[j] << s.a[j] << s.u[j] << s0.u[j];
    csv.end();
  }
  out.add("scalar_run.csv", csv);
  const double change = (s.u - s0.u).cwiseAbs().maxCoeff();
  out.summary = {{"time", s.time}, {"mass", s.u.sum() * s.dx}, {"max_change", change}};
  out.console = "t = " + csv_number(s.time) + ", max |u - u0| " + csv_number(change) + "\n";
}

DeviceConfig device_config(const ScenarioConfig& c, double bias) {
  DeviceConfig cfg = DeviceConfig::standard(static_cast<int>(c.integer("device.n_cells")), c.real("device.lambda"),
                                            bias, c.real("device.tau"));
  cfg.cfl = c.real("device.cfl");
  cfg.literal_damping = c.flag("device.literal_damping");
  cfg.validate();
  return cfg;
}

SteadyOptions steady_options(const ScenarioConfig& c) {
  SteadyOptions o;
  o.max_steps = c.integer("device.max_steps");
  o.tol = c.real("device.tol");
  return o;
}

void device_run(const ScenarioConfig& c, Outputs& out) {
  const DeviceConfig cfg = device_config(c, c.real("device.bias"));
  const DeviceRun r = run_to_steady(rest_state(cfg), cfg, steady_options(c));
  if (!r.converged)
    throw ConvergenceError("device run: no steady state after " + std::to_string(r.steps) + " steps (residual " +
                           csv_number(r.residual) + ")");
  const Vec x = cfg.centres(), u = r.state.velocity(), M = mach_number(r.state);
  Csv csv({"x[1]", "doping[1]", "rho[1]", "u[1]", "momentum[1]", "phi[1]", "mach[1]"});
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    csv << x[j] << cfg.doping[j] << r.state.rho[j] << u[j] << r.state.momentum[j] << r.potential.phi[j] << M[j];
    csv.end();
  }
  out.add("device_run.csv", csv);
  Vec J = r.state.momentum;
  std::sort(J.data(), J.data() + J.size());
  out.summary = {{"steps", r.steps},
                 {"time", r.time},
                 {"residual", r.residual},
                 {"current", J[J.size() / 2]},
                 {"oscillation", J[J.size() - 1] - J[0]},
                 {"sonic_points", count_sonic_points(r.state)},
                 {"sonic_shocks", count_sonic_shocks(r.state)}};
  out.console = "steady after " + std::to_string(r.steps) + " steps, current " + csv_number(J[J.size() / 2]) +
                ", sonic points " + std::to_string(count_sonic_points(r.state)) + ", sonic shocks " +
                std::to_string(count_sonic_shocks(r.state)) + "\n";
}

void device_iv(const ScenarioConfig& c, Outputs& out) {
  const DeviceConfig cfg = device_config(c, 0.0);
  const auto rows = iv_curve(cfg, c.reals("device.biases"), steady_options(c));
  Csv csv({"bias[1]", "current[1]", "oscillation[1]", "sonic_points[1]", "sonic_shocks[1]", "converged[1]",
           "steps[1]"});
  int failed = 0;
  for (const auto& r : rows) {
    csv << r.bias << r.current << r.oscillation << r.sonic_points << r.sonic_shocks << r.converged << r.steps;
    csv.end();
    failed += !r.converged;
    out.console += "V = " + fmt_g(r.bias) + "  J = " + csv_number(r.current) + (r.converged ? "" : "  (not converged)") + "\n";
  }
  out.add("device_iv.csv", csv);
  out.summary = {{"rows", rows.size()}, {"not_converged", failed}};
}

void vfp_eigen(const ScenarioConfig& c, Outputs& out) {
  VfpParams p{c.real("vfp.u"), c.real("vfp.kappa"), std::max<int>(1, static_cast<int>(c.integer("vfp.n")))};
  p.validate();
  Csv csv({"n[1]", "mu_plus[1]", "mu_minus[1]"});
  char line[128];
  out.console = "   n          mu_+n          mu_-n\n";
  for (int n = 0; n <= c.integer("vfp.n"); ++n) {
    const double a = vfp_eigenvalue(n, 1, p), b = vfp_eigenvalue(n, -1, p);
    csv << n << a << b;
    csv.end();
    std::snprintf(line, sizeof line, "%4d %14.10f %14.10f\n", n, a, b);
    out.console += line;
  }
  out.add("vfp_eigen.csv", csv);
  out.summary = {{"u", p.u}, {"kappa", p.kappa}};
}

void vfp_relax(const ScenarioConfig& c, Outputs& out) {
  const double kappa = c.real("vfp.kappa");
  const int nc = static_cast<int>(c.integer("vfp.n_cells"));
  CoupledState s;
  s.dx = 1.0 / nc;
  s.f.grid = VelocityGrid::hermite(static_cast<int>(c.integer("vfp.n_velocity")), kappa);
  s.u.resize(nc);
  s.f.f.resize(nc, s.f.grid.size());
  for (int i = 0; i < nc; ++i) {
    const double x = (i + 0.5) * s.dx;
    s.u[i] = c.real("vfp.u_mean") + c.real("vfp.u_amplitude") * std::sin(2 * M_PI * x);
    s.f.f.row(i) = maxwellian(s.f.grid, 1.0 + c.real("vfp.rho_amplitude") * std::cos(2 * M_PI * x),
                              c.real("vfp.drift_amplitude") * std::sin(4 * M_PI * x))
                       .transpose();
  }
  CoupledOptions o;
  o.n_modes = static_cast<int>(c.integer("vfp.n_modes"));
  o.reconstruct = c.flag("vfp.reconstruct");
  const double t_end = c.real("vfp.t_end"), cfl = c.real("vfp.cfl");
  const double p0 = s.total_momentum();
  long steps = 0;
  while (s.time < t_end * (1 - 1e-14)) {
    s = burgers_vfp_step(s, std::min(coupled_max_dt(s, cfl), t_end - s.time), o);
    ++steps;
  }
  const Vec rho = s.f.density(), J = s.f.momentum();
  Csv csv({"x[1]", "u[1]", "rho[1]", "momentum[1]"});
  for (int i = 0; i < nc; ++i) {
    csv << (i + 0.5) * s.dx << s.u[i] << rho[i] << J[i];
    csv.end();
  }
  out.add("vfp_relax.csv", csv);
  const double drift = std::abs(s.total_momentum() - p0) / t_end;
  out.summary = {{"steps", steps},
                 {"time", s.time},
                 {"total_momentum_initial", p0},
                 {"total_momentum_final", s.total_momentum()},
                 {"momentum_drift_rate", drift},
                 {"min_f", s.f.f.minCoeff()}};
  out.console = std::to_string(steps) + " steps, |d/dt total momentum| " + csv_number(drift) + "\n";
}

BabenkoOptions babenko_options(const ScenarioConfig& c) {
  BabenkoOptions o;
  o.n_points = static_cast<int>(c.integer("waterwave.n_points"));
  o.window = c.real("waterwave.window");
  return o;
}

void waterwave_solitary(const ScenarioConfig& c, Outputs& out) {
  const BabenkoWave w = babenko_wave(c.real("waterwave.amplitude"), babenko_options(c));
  const ConformalSurfaceState s = babenko_initial_state(w);
  const double d = w.wave.d;
  Csv csv({"xi[d]", "x[d]", "gamma[d]", "phi[d sqrt(g d)]"});
  const Vec xi = s.gamma.grid.nodes();
  const double phi_scale = d * std::sqrt(s.g * d);
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    csv << xi[j] / d << w.wave.abscissa[j] / d << w.wave.profile.samples[j] / d << s.phi_s.samples[j] / phi_scale;
    csv.end();
  }
  out.add("waterwave_solitary.csv", csv);
  out.summary = {{"amplitude_ratio", w.wave.amplitude_ratio},
                 {"speed_ratio", w.wave.speed_ratio},
                 {"depth", d},
                 {"iterations", w.wave.iterations},
                 {"residual", w.wave.residual}};
  out.console = "c / sqrt(g d) = " + csv_number(w.wave.speed_ratio) + "\n";
}

void waterwave_evolve(const ScenarioConfig& c, Outputs& out) {
  const BabenkoWave w = babenko_wave(c.real("waterwave.amplitude"), babenko_options(c));
  const ConformalSurfaceState s = babenko_initial_state(w);
  const double d = w.wave.d, T = c.real("waterwave.t_end") * std::sqrt(d / s.g);
  const int ns = static_cast<int>(c.integer("waterwave.snapshots"));
  EvolveOptions o;
  o.courant = c.real("waterwave.courant");
  for (int i = 0; i < ns; ++i) o.snapshot_times.push_back(T * i / (ns - 1));
  const Trajectory tr = evolve(s, T, o);
  const CrestInfo c0 = locate_crest(s);
  const ConservedQuantities q0 = conserved(s);
  Csv csv({"time[sqrt(d/g)]", "crest_x[d]", "amplitude[d]", "mass_drift[1]", "energy_drift[1]"});
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const CrestInfo ci = locate_crest(tr.snapshots[i]);
    const ConservedQuantities qi = conserved(tr.snapshots[i]);
    csv << tr.snapshots[i].time / std::sqrt(d / s.g) << ci.x / d << (ci.elevation - ci.far_elevation) / d
        << (qi.mass - q0.mass) / std::abs(q0.mass) << (qi.energy - q0.energy) / std::abs(q0.energy);
    csv.end();
  }
  out.add("waterwave_evolve.csv", csv);
  const ConformalSurfaceState& f = tr.final_state;
  const CrestInfo c1 = locate_crest(f);
  const double speed = ((c1.x - c0.x) / T - c1.far_velocity) / std::sqrt(s.g * d);
  const double amp = (c1.elevation - c1.far_elevation) / d;
  Csv prof({"xi[d]", "eta[d]"});
  const Vec xi = f.gamma.grid.nodes();
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    prof << xi[j] / d << (f.gamma.samples[j] - w.gamma_inf) / d;
    prof.end();
  }
  out.add("waterwave_final.csv", prof);
  out.summary = {{"steps", tr.steps},
                 {"speed_steady", w.wave.speed_ratio},
                 {"speed_measured", speed},
                 {"speed_difference", speed - w.wave.speed_ratio},
                 {"amplitude_initial", w.wave.amplitude_ratio},
                 {"amplitude_final", amp},
                 {"mass_drift", tr.mass_drift()},
                 {"energy_drift", tr.energy_drift()}};
  out.console = "speed " + csv_number(speed) + " (steady " + csv_number(w.wave.speed_ratio) + "), amplitude " +
                csv_number(amp) + "\n";
}

void serre_dispersion(const ScenarioConfig& c, Outputs& out) {
  const auto& kd = c.reals("serre.kd");
  const double alpha = c.real("serre.alpha");
  Csv csv({"kd[1]", "c2_esgn[g d]", "c2_exact[g d]", "difference[g d]"});
  for (double k : kd) {
    csv << k << esgn_dispersion(k, alpha) << exact_dispersion(k) << dispersion_error(k, alpha);
    csv.end();
  }
  out.add("serre_dispersion.csv", csv);
  out.summary = {{"alpha", alpha}, {"samples", kd.size()}};
}

void serre_solitary(const ScenarioConfig& c, Outputs& out) {
  ProfileOptions o;
  o.n_points = static_cast<int>(c.integer("serre.n_points"));
  const double a = c.real("serre.amplitude");
  const SolitaryWave w = c.tag("serre.model") == "sgn" ? sgn_solitary(a, 1.0, 1.0, o)
                                                       : esgn_solitary(a, c.real("serre.alpha"), 1.0, 1.0, o);
  Csv csv({"x[d]", "eta[d]"});
  const Vec x = w.profile.grid.nodes();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    csv << x[j] << w.profile.samples[j];
    csv.end();
  }
  out.add("serre_solitary.csv", csv);
  out.summary = {{"speed_ratio", w.speed_ratio}, {"residual", w.residual}};
  out.console = "c / sqrt(g d) = " + csv_number(w.speed_ratio) + "\n";
}

void serre_sweep(const ScenarioConfig& c, Outputs& out) {
  const auto& amps = c.reals("serre.amplitudes");
  Csv csv({"model[tag]", "amplitude[d]", "speed[sqrt(g d)]", "ok[1]"});
  json rows = json::array();
  for (const auto& m : c.tags("serre.models")) {
    for (const auto& r : speed_amplitude_sweep(m, amps, c.real("serre.alpha"))) {
      csv << m << r.amplitude_ratio << r.speed_ratio << r.ok;
      csv.end();
      rows.push_back({{"model", m}, {"amplitude", r.amplitude_ratio}, {"speed", r.speed_ratio}, {"ok", r.ok},
                      {"message", r.message}});
      char line[128];
      std::snprintf(line, sizeof line, "%-6s a/d = %-5g  c/sqrt(gd) = %.10f%s\n", m.c_str(), r.amplitude_ratio,
                    r.speed_ratio, r.ok ? "" : "  (failed)");
      out.console += line;
    }
  }
  out.add("serre_sweep.csv", csv);
  out.summary = {{"rows", rows}};
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"scalar run", scalar_run},       {"device run", device_run},
      {"device iv", device_iv},         {"vfp eigen", vfp_eigen},
      {"vfp relax", vfp_relax},         {"waterwave solitary", waterwave_solitary},
      {"waterwave evolve", waterwave_evolve}, {"serre dispersion", serre_dispersion},
      {"serre solitary", serre_solitary}, {"serre sweep", serre_sweep},
  };
  return r;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
  if (!f) throw Error("cannot write " + p.string());
}

}  // namespace

std::string error_json(const Error& e) {
  json j{{"kind", e.kind()}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const ConfigErrors*>(&e)) {
    j["message"] = "invalid configuration";
    json issues = json::array();
    for (const auto& i : ce->issues()) issues.push_back({{"path", i.path}, {"message", i.message}});
    j["issues"] = issues;
  }
  if (const auto* re = dynamic_cast<const ResonanceError*>(&e)) {
    j["a_location"] = re->a_location();
    j["state"] = re->state();
  }
  if (const auto* pe = dynamic_cast<const PositivityError*>(&e)) j["cell"] = pe->cell();
  return j.dump(2) + "\n";
}

RunResult run_in_memory(const ScenarioConfig& config) {
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  auto it = runners().find(config.module + " " + config.command);
  if (it == runners().end()) throw ConfigError("no scenario " + config.module + " " + config.command);
  Outputs out;
  try {
    it->second(config, out);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.status = 1;
    r.error_json = error_json(e);
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.status) return r;
  r.console = out.console;
  r.summary_json = out.summary.dump(2) + "\n";
  r.artifacts = std::move(out.files);
  r.artifacts.push_back({"summary.json", r.summary_json});
  r.artifacts.push_back({"config.resolved", config.resolved_text()});
  return r;
}

RunResult run(const ScenarioConfig& config) {
  RunResult r = run_in_memory(config);
  namespace fs = std::filesystem;
  const fs::path dir(config.output);
  fs::create_directories(dir);
  if (r.status) {
    write_file(dir / "error.json", r.error_json);
    return r;
  }
  json files = json::array();
  for (const auto& a : r.artifacts) {
    write_file(dir / a.name, a.content);
    files.push_back({{"name", a.name}, {"bytes", a.content.size()}, {"fnv1a64", fnv1a_hex(a.content)}});
  }
  json manifest{{"tool", "hyplab"},       {"version", config.version}, {"module", config.module},
                {"command", config.command}, {"config_hash", config.hash}, {"wall_time_s", r.wall_time},
                {"files", files}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return r;
}

}  // namespace hyplab
