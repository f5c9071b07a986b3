// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "hyplab/euler_poisson.hpp"
#include "hyplab/lab.hpp"
#include "hyplab/scalar_wb.hpp"
#include "hyplab/serre.hpp"
#include "hyplab/vfp.hpp"
#include "hyplab/waterwave.hpp"

using namespace hyplab;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("criterion %d %s: %s (%.1f s) | %s\n", id, title, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
  std::fflush(stdout);
}

const double kAmplitudes[] = {0.1, 0.45, 0.7};

Verdict table_row(const std::function<double(double)>& speed, const double (&want)[3], const double (&tol)[3]) {
  Verdict v;
  for (int i = 0; i < 3; ++i) {
    const double c = speed(kAmplitudes[i]);
    const double err = std::abs(c - want[i]);
    v.require(err <= tol[i], "a/d=" + fmt("%g", kAmplitudes[i]) + " c=" + fmt("%.10f", c) + " |c-" +
                                 fmt("%g", want[i]) + "|=" + fmt("%.2e", err) + " tol " + fmt("%g", tol[i]));
  }
  return v;
}

// r^m times the z^m Taylor coefficient of tanh(z)/z, by the trapezoidal rule
// for the Cauchy integral on |z| = r.
double thc_term(int m, double r, int n = 128) {
  std::complex<double> sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = 2 * M_PI * j / n;
    const std::complex<double> z = std::polar(r, t);
    sum += std::tanh(z) / z * std::polar(1.0, -m * t);
  }
  return sum.real() / n;
}

Vec step_change(const TempleState& a, const TempleState& b) {
  return (b.u - a.u).array().abs() / a.u.array().abs();
}

double front(const TempleState& s) {
  for (Eigen::Index j = 0; j + 1 < s.u.size(); ++j)
    if (s.u[j] >= 0.5 && s.u[j + 1] < 0.5) return s.x[j] + s.dx * (s.u[j] - 0.5) / (s.u[j] - s.u[j + 1]);
  return NAN;
}

nlohmann::json lab_summary(const std::string& text) {
  const RunResult r = run_in_memory(parse_config(text));
  if (r.status != 0) throw std::runtime_error(r.error_json);
  return nlohmann::json::parse(r.summary_json);
}

}  // namespace

int main() {
  criterion(1, "SGN speeds", [] {
    return table_row([](double a) { return sgn_solitary(a).speed_ratio; }, {1.04880, 1.2041, 1.3038},
                     {5e-5, 5e-5, 5e-5});
  });

  criterion(2, "Euler speeds (Babenko, 4096 modes)", [] {
    return table_row([](double a) { return babenko_solitary(a, 0.0, 4096).speed_ratio; }, {1.048548, 1.1973, 1.2788},
                     {1e-5, 5e-4, 5e-4});
  });

  criterion(3, "eSGN speeds (alpha 6/5)", [] {
    return table_row([](double a) { return esgn_solitary(a, 1.2).speed_ratio; }, {1.04856, 1.1999, 1.2946},
                     {5e-5, 5e-4, 5e-4});
  });

  criterion(4, "dispersion order and thc series", [] {
    Verdict v;
    const auto slope = [](double alpha) {
      return std::log(std::abs(dispersion_error(1e-1, alpha)) / std::abs(dispersion_error(1e-3, alpha))) /
             std::log(1e2);
    };
    const double s12 = slope(1.2), s1 = slope(1.0);
    v.require(std::abs(s12 - 6.0) <= 0.2, "slope(alpha 1.2)=" + fmt("%.4f", s12));
    v.require(std::abs(s1 - 4.0) <= 0.2, "slope(alpha 1)=" + fmt("%.4f", s1));
    const double kd = 0.1;
    const int power[] = {2, 4, 6};
    const double coeff[] = {-1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(thc_term(power[i], kd) - coeff[i] * std::pow(kd, power[i])));
    v.require(worst <= 1e-10, "series terms at kd=0.1 max err " + fmt("%.2e", worst));
    // what remains after three terms is the kd^8 term
    const double rest = exact_dispersion(kd) - (1.0 + coeff[0] * 1e-2 + coeff[1] * 1e-4 + coeff[2] * 1e-6);
    const double next = 62.0 / 2835.0 * 1e-8;
    v.require(std::abs(rest - next) <= 1e-12, "thc(0.1)-series=" + fmt("%.3e", rest) + " vs kd^8 term " +
                                                  fmt("%.3e", next));
    return v;
  });

  criterion(5, "steady/unsteady cross-check", [] {
    Verdict v;
    BabenkoOptions o;
    o.n_points = 1024;
    const BabenkoWave w = babenko_wave(0.1, o);
    const ConformalSurfaceState s = babenko_initial_state(w);
    const double d = w.wave.d, T = 10.0 * std::sqrt(d / s.g);
    const Trajectory t = evolve(s, T);
    const CrestInfo c0 = locate_crest(s), c1 = locate_crest(t.final_state);
    const double speed = ((c1.x - c0.x) / T - c1.far_velocity) / std::sqrt(s.g * d);
    const double amp = (c1.elevation - c1.far_elevation) / d;
    v.require(std::abs(amp - 0.1) / 0.1 <= 1e-3, "amplitude rel err " + fmt("%.2e", std::abs(amp - 0.1) / 0.1));
    v.require(std::abs(speed - w.wave.speed_ratio) <= 1e-4,
              "speed err " + fmt("%.2e", std::abs(speed - w.wave.speed_ratio)));
    v.require(std::abs(t.mass_drift()) <= 1e-8, "mass drift " + fmt("%.2e", t.mass_drift()));
    v.require(std::abs(t.energy_drift()) <= 1e-8, "energy drift " + fmt("%.2e", t.energy_drift()));
    return v;
  });

  criterion(6, "Euler-Poisson well-balancedness", [] {
    Verdict v;
    {
      DeviceConfig c = DeviceConfig::standard(64, 0.15, 0.0);
      c.doping = Vec::Ones(64);
      MomentState s = rest_state(c);
      PotentialField phi = poisson_solve(s.rho, c);
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const MomentState next = device_step(s, phi, c, max_stable_dt(s, c));
        worst = std::max({worst, ((next.rho - s.rho).array().abs() / s.rho.array()).maxCoeff(),
                          next.momentum.cwiseAbs().maxCoeff()});
        s = next;
      }
      v.require(worst <= 1e-13, "rest per-step change " + fmt("%.1e", worst));
    }
    {
      const DeviceConfig c = DeviceConfig::standard(64, 0.15, 0.0);
      MomentState s = rest_state(c);
      const Vec x = c.centres();
      for (int j = 0; j < 64; ++j) {
        s.rho[j] *= 1.0 + 0.1 * std::exp(-40 * x[j] * x[j]);
        s.momentum[j] = 0.05 * x[j] * std::exp(-20 * x[j] * x[j]);
      }
      const DeviceRun r = run_to_steady(s, c);
      const double j = r.state.momentum.cwiseAbs().maxCoeff();
      v.require(r.converged && j < 1e-6, "V=0 from perturbed data max|rho u|=" + fmt("%.1e", j));
    }
    {
      const DeviceConfig c = DeviceConfig::standard(64, 0.15, 0.15);
      const DeviceRun r = run_to_steady(rest_state(c), c);
      const int n = count_sonic_points(r.state);
      v.require(r.converged && n == 2, "undamped bias 0.15 sonic points " + std::to_string(n));
    }
    {
      DeviceConfig c = DeviceConfig::standard(64, 0.15, 0.9, 1.0);
      c.literal_damping = true;
      const DeviceRun r = run_to_steady(rest_state(c), c);
      const int n = count_sonic_shocks(r.state);
      v.require(r.converged && n == 0, "tau=1 bias 0.9 sonic shocks " + std::to_string(n));
      c.literal_damping = false;
      const DeviceRun rd = run_to_steady(rest_state(c), c);
      v.detail += " (dx-scaled damping: " + std::to_string(count_sonic_shocks(rd.state)) + " shocks)";
    }
    return v;
  });

  criterion(7, "VFP spectra", [] {
    Verdict v;
    const double m4 = vfp_eigenvalue(4, 1, VfpParams{0.0, 1.0});
    const double m0p = vfp_eigenvalue(0, 1, VfpParams{3.0, 1.0}), m0m = vfp_eigenvalue(0, -1, VfpParams{3.0, 1.0});
    v.require(m4 == 2.0 && m0p == 0.0 && m0m == -3.0,
              "mu+4=" + fmt("%g", m4) + " mu0+=" + fmt("%g", m0p) + " mu0-=" + fmt("%g", m0m));
    double worst = 0.0, worst_fine = 0.0;
    for (double u : {0.0, 0.5, -1.2})
      for (int n = 0; n <= 10; ++n)
        for (int sign : {1, -1}) {
          worst = std::max(worst, mode_residual(n, sign, VfpParams{u, 1.0}, 0.02));
          worst_fine = std::max(worst_fine, mode_residual(n, sign, VfpParams{u, 1.0}, 0.01));
        }
    v.require(worst <= 1e-8 && worst_fine <= 1e-8,
              "max residual n<=10 " + fmt("%.1e", worst) + " (h=0.02), " + fmt("%.1e", worst_fine) + " (h=0.01)");
    const VelocityGrid g = VelocityGrid::hermite(32, 1.0);
    double fixed = 0.0;
    for (double u : {0.0, 0.6}) {
      const Vec M = maxwellian(g, 1.0, u);
      Vec in(32);
      for (std::size_t i = 0; i < 16; ++i) in[i] = M[g.positive[i]];
      for (std::size_t i = 0; i < 16; ++i) in[16 + i] = M[g.negative[i]];
      for (auto mode : {DegenerateMode::drop, DegenerateMode::linear_response})
        fixed = std::max(fixed, (scattering_matrix(VfpParams{u, 1.0, 8}, 1.0, g, mode).map * in - in)
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    v.require(fixed <= 1e-8, "Maxwellian through scattering map " + fmt("%.1e", fixed));
    return v;
  });

  criterion(8, "Burgers/VFP momentum", [] {
    Verdict v;
    const auto s = lab_summary("module = vfp\ncommand = relax\n");
    const double rate = s["momentum_drift_rate"];
    v.require(rate <= 1e-8, "|d/dt momentum| " + fmt("%.1e", rate) + " over t=" + fmt("%g", s["time"]) + ", " +
                                std::to_string(s["steps"].get<long>()) + " steps");
    return v;
  });

  criterion(9, "scalar well-balanced scheme", [] {
    Verdict v;
    ScalarLaw law = ScalarLaw::burgers();
    law.source = [](double u) { return -u; };
    law.source_coefficient = [](double x) { return std::abs(x) < 0.5 ? 2.0 : 0.0; };
    TempleState s = chained_steady_state(-1.0, 1.0, 100, 3.0, law);
    const double dt = max_stable_dt(s, law);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const TempleState next = wb_godunov_step(s, law, dt);
      worst = std::max(worst, step_change(s, next).maxCoeff());
      s = next;
    }
    v.require(worst <= 1e-14, "steady per-step change " + fmt("%.1e", worst));

    const ScalarLaw burgers = ScalarLaw::burgers();
    std::vector<double> h, e;
    for (int n : {100, 200, 400, 800, 1600}) {
      TempleState r = make_temple_state(-1.0, 1.0, n, [](double x) { return x < 0 ? 1.0 : 0.0; }, burgers);
      r = run_to(r, burgers, 0.8);
      h.push_back(r.dx);
      e.push_back(std::abs(front(r) - 0.4));
    }
    Eigen::MatrixXd A(h.size(), 2);
    Vec y(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = std::log(h[i]);
      y[i] = std::log(e[i]);
    }
    const double order = A.colPivHouseholderQr().solve(y)[1];
    v.require(order >= 0.9, "shock position order " + fmt("%.3f", order));

    const auto b = lab_summary("module = scalar\ncommand = run\nscalar.flux = traffic\n");
    const double ratio = b["sensitivity"];
    v.require(std::isfinite(ratio), "Bressan sensitivity ratio " + fmt("%.4g", ratio) + " (max norm), " +
                                        fmt("%.4g", b["l1_sensitivity"]) + " (L1)");
    return v;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
