#include "hyplab/serre.hpp"

#include <array>
#include <future>

#include "hyplab/ode.hpp"
#include "hyplab/quadrature.hpp"
#include "hyplab/waterwave.hpp"

namespace hyplab {

namespace {

// Taylor coefficients of tanh(x)/x in powers of x^2.
constexpr std::array<double, 15> kThc = {
    1.0,
    -1.0 / 3.0,
    2.0 / 15.0,
    -17.0 / 315.0,
    62.0 / 2835.0,
    -1382.0 / 155925.0,
    21844.0 / 6081075.0,
    -929569.0 / 638512875.0,
    6404582.0 / 10854718875.0,
    -443861162.0 / 1856156927625.0,
    18888466084.0 / 194896477400625.0,
    -113927491862.0 / 2900518163668125.0,
    1.5918905069328964e-05,
    -6.4516892156554306e-06,
    2.6147711512907546e-06,
};

Vec ddx(const Vec& f, const PeriodicGrid& g, int order = 1) {
  return apply_multipliers(f, derivative_symbol(order).multipliers(g));
}

void check_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw IllPosed("alpha >= 1 required (c^2 < 0 for some k otherwise)");
}

// Traveling-wave coefficients in terms of the elevation eta = h - d:
// A(h) h'' + B(h) h'^2 = G(h).
struct EsgnCoefficients {
  double c, d, g, alpha;
  double A(double h) const { return (1.0 - alpha) * g * h + alpha * c * c * d * d / (h * h); }
  double B(double h) const { return (2.0 - 3.0 * alpha) * c * c * d * d / (h * h * h); }
  double G(double eta) const {
    const double h = d + eta;
    return 3.0 * (-0.5 * g * eta * (2.0 * d + eta) + c * c * d * eta / h) / (h * h);
  }
  // integrating factor normalised to 1 at h = d
  double mu(double h) const {
    const double beta = (1.0 - alpha) * g, delta = alpha * c * c * d * d;
    const double p = 2.0 * (2.0 - 3.0 * alpha) / (3.0 * alpha);
    const double r = (h * h * h / (beta * h * h * h + delta)) / (d * d * d / (beta * d * d * d + delta));
    return std::pow(r, p);
  }
  double integrand(double eta) const {
    const double h = d + eta;
    return mu(h) * G(eta) / A(h);
  }
};

const GaussRule& gl64() {
  static const GaussRule r = gauss_legendre(64);
  return r;
}
const GaussRule& gl32() {
  static const GaussRule r = gauss_legendre(32);
  return r;
}

double auto_window(double amp_ratio, double kappa_t) {
  return 2.0 * std::log(4.0 * amp_ratio / 1e-15) / kappa_t;
}

}  // namespace

void ShallowState::validate() const {
  if (h.grid != u_bar.grid) throw InvalidInput("ShallowState: grid mismatch");
  if (!(h.samples.minCoeff() > 0.0)) throw InvalidInput("ShallowState: depth must be positive");
  check_alpha(alpha);
}

RealField vertical_acceleration(const RealField& h, const RealField& u_bar, const RealField& u_bar_t) {
  if (h.grid != u_bar.grid || h.grid != u_bar_t.grid) throw InvalidInput("vertical_acceleration: grid mismatch");
  const PeriodicGrid& G = h.grid;
  const Vec ux = ddx(u_bar.samples, G);
  const Vec inner = u_bar_t.samples + dealiased_product(u_bar.samples, ux);
  const Vec dinner = ddx(inner, G);
  const Vec ux2 = dealiased_product(ux, ux);
  Vec gamma = 2.0 * dealiased_product(h.samples, ux2) - dealiased_product(h.samples, dinner);
  return RealField(G, std::move(gamma));
}

RealField vertical_acceleration_alpha(const RealField& h, const RealField& u_bar, const RealField& u_bar_t,
                                      double g, double alpha) {
  if (h.grid != u_bar.grid || h.grid != u_bar_t.grid) throw InvalidInput("vertical_acceleration: grid mismatch");
  const PeriodicGrid& G = h.grid;
  const Vec ux = ddx(u_bar.samples, G);
  const Vec hxx = ddx(h.samples, G, 2);
  const Vec inner = u_bar_t.samples + dealiased_product(u_bar.samples, ux);
  const Vec dinner = ddx(inner, G);
  const Vec ux2 = dealiased_product(ux, ux);
  Vec gamma = 2.0 * dealiased_product(h.samples, ux2) + (1.0 - alpha) * g * dealiased_product(h.samples, hxx) -
              alpha * dealiased_product(h.samples, dinner);
  return RealField(G, std::move(gamma));
}

double esgn_dispersion(double kd, double alpha) {
  check_alpha(alpha);
  if (kd < 0) throw InvalidInput("esgn_dispersion: kd must be >= 0");
  const double x2 = kd * kd;
  return (3.0 + (alpha - 1.0) * x2) / (3.0 + alpha * x2);
}

double exact_dispersion(double kd) {
  if (kd < 0) throw InvalidInput("exact_dispersion: kd must be >= 0");
  if (kd == 0.0) return 1.0;
  if (kd < 1e-4) return 1.0 - kd * kd / 3.0;
  return std::tanh(kd) / kd;
}

double dispersion_error(double kd, double alpha) {
  check_alpha(alpha);
  if (kd < 0) throw InvalidInput("dispersion_error: kd must be >= 0");
  if (kd > 0.5) return esgn_dispersion(kd, alpha) - exact_dispersion(kd);
  // -x^2/3 * 1/(1 + alpha x^2/3) - (thc - 1), term by term in x^2
  const double x2 = kd * kd;
  double sum = 0.0, xp = x2, geo = -1.0 / 3.0;
  for (std::size_t m = 1; m < kThc.size(); ++m) {
    sum += (geo - kThc[m]) * xp;
    geo *= -alpha / 3.0;
    xp *= x2;
  }
  return sum;
}

DispersionCurve esgn_dispersion_curve(const Vec& kd, double alpha) {
  DispersionCurve c{kd, Vec(kd.size())};
  for (Eigen::Index i = 0; i < kd.size(); ++i) c.c2_over_gd[i] = esgn_dispersion(kd[i], alpha);
  return c;
}

double tail_decay_rate(double c, double d, double g, double alpha) {
  const double num = 3.0 * (c * c - g * d);
  const double den = d * d * ((1.0 - alpha) * g * d + alpha * c * c);
  if (!(num > 0 && den > 0)) throw InvalidInput("tail_decay_rate: subcritical speed, no decaying tail");
  return std::sqrt(num / den);
}

SolitaryWave sgn_solitary(double amplitude_ratio, double d, double g, const ProfileOptions& opt) {
  if (!(amplitude_ratio > 0.0)) throw InvalidInput("sgn_solitary: amplitude must be positive");
  if (!(d > 0.0 && g > 0.0)) throw InvalidInput("sgn_solitary: d and g must be positive");
  const double a = amplitude_ratio * d;
  const double c = std::sqrt(g * (d + a));
  const double kappa = std::sqrt(3.0 * a / (d * d * (d + a)));
  const double L = opt.window > 0 ? opt.window : auto_window(amplitude_ratio, kappa);
  PeriodicGrid grid(opt.n_points, L, -0.5 * L);
  SolitaryWave w(grid);
  w.profile = RealField::from_function(grid, [&](double x) {
    const double s = 1.0 / std::cosh(0.5 * kappa * x);
    return a * s * s;
  });
  w.abscissa = grid.nodes();
  w.amplitude_ratio = amplitude_ratio;
  w.speed = c;
  w.speed_ratio = c / std::sqrt(g * d);
  w.d = d;
  w.g = g;
  w.source_model = WaveModel::sgn;
  RealField h(grid, w.profile.samples.array() + d);
  RealField u(grid, c * (1.0 - d / h.samples.array()));
  w.residual = traveling_residual(h, u, c, g, 1.0).max();
  return w;
}

double esgn_speed_residual(double c, double amplitude, double alpha, double d, double g) {
  EsgnCoefficients k{c, d, g, alpha};
  return integrate_gl([&](double eta) { return k.integrand(eta); }, 0.0, amplitude, gl64());
}

SolitaryWave esgn_solitary(double amplitude_ratio, double alpha, double d, double g, const ProfileOptions& opt) {
  check_alpha(alpha);
  if (!(amplitude_ratio > 0.0)) throw InvalidInput("esgn_solitary: amplitude must be positive");
  if (!(d > 0.0 && g > 0.0)) throw InvalidInput("esgn_solitary: d and g must be positive");
  const double a = amplitude_ratio * d;
  const double c0 = std::sqrt(g * (d + a));
  const double lo = std::max(0.9 * c0, std::sqrt(g * d) * (1.0 + 1e-9));
  const double hi = c0 * (1.0 + 1e-3);
  auto F = [&](double c) { return esgn_speed_residual(c, a, alpha, d, g); };
  const double flo = F(lo), fhi = F(hi);
  if (!(flo * fhi <= 0.0))
    throw ConvergenceError("esgn_solitary: speed not bracketed on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "], residuals " + std::to_string(flo) + ", " +
                           std::to_string(fhi));
  const double c = brent_root(F, lo, hi, 1e-15 * c0);

  EsgnCoefficients k{c, d, g, alpha};
  // P(h) = h'^2 from the linear first-order equation in h
  auto P = [&](double eta) {
    if (eta <= 0.0) return 0.0;
    const double I = integrate_gl([&](double e) { return k.integrand(e); }, 0.0, eta, gl32());
    return std::max(0.0, 2.0 * I / k.mu(d + eta));
  };

  const double kappa_t = tail_decay_rate(c, d, g, alpha);
  const double L = opt.window > 0 ? opt.window : auto_window(amplitude_ratio, kappa_t);
  const int n = opt.n_points;
  if (n % 2 != 0) throw InvalidInput("esgn_solitary: n_points must be even");
  PeriodicGrid grid(n, L, -0.5 * L);
  const double dx = grid.spacing();

  // samples at xi = j dx, j = 0..n/2 (the last one is the window edge)
  Vec eta_pos(n / 2 + 1);
  eta_pos[0] = a;
  OdeOptions o;
  o.rtol = 1e-13;
  o.atol = 1e-16;
  Eigen::Vector2d y(a, 0.0);
  int j = 0;
  auto rhs2 = [&](double, const Eigen::Vector2d& s) {
    const double h = d + s[0];
    return Eigen::Vector2d(s[1], (k.G(s[0]) - k.B(h) * s[1] * s[1]) / k.A(h));
  };
  while (j < n / 2 && y[0] > 0.5 * a) {
    y = dopri45(rhs2, y, j * dx, (j + 1) * dx, o);
    eta_pos[++j] = y[0];
  }
  double e = y[0];
  auto rhs1 = [&](double, double s) { return -std::sqrt(P(s)); };
  while (j < n / 2) {
    e = dopri45(rhs1, e, j * dx, (j + 1) * dx, o);
    eta_pos[++j] = e;
  }

  SolitaryWave w(grid);
  const int mid = n / 2;
  for (int i = 0; i < n; ++i) w.profile.samples[i] = eta_pos[std::abs(i - mid)];
  w.abscissa = grid.nodes();
  w.amplitude_ratio = amplitude_ratio;
  w.speed = c;
  w.speed_ratio = c / std::sqrt(g * d);
  w.d = d;
  w.g = g;
  w.source_model = WaveModel::esgn;
  RealField h(grid, w.profile.samples.array() + d);
  RealField u(grid, c * (1.0 - d / h.samples.array()));
  w.residual = traveling_residual(h, u, c, g, alpha).max();
  return w;
}

TravelingResidual traveling_residual(const RealField& h, const RealField& u_bar, double c, double g, double alpha) {
  if (h.grid != u_bar.grid) throw InvalidInput("traveling_residual: grid mismatch");
  const PeriodicGrid& G = h.grid;
  const Vec ux = ddx(u_bar.samples, G);
  RealField ut(G, -c * ux);
  const RealField gamma = vertical_acceleration_alpha(h, u_bar, ut, g, alpha);
  const Vec hu = dealiased_product(h.samples, u_bar.samples);
  const Vec mass = ddx(Vec(hu - c * h.samples), G);
  const Vec h2 = dealiased_product(h.samples, h.samples);
  const Vec flux = dealiased_product(hu, u_bar.samples) + 0.5 * g * h2 +
                   dealiased_product(h2, gamma.samples) / 3.0 - c * hu;
  const Vec mom = ddx(flux, G);
  return {mass.cwiseAbs().maxCoeff(), mom.cwiseAbs().maxCoeff()};
}

std::vector<SweepRow> speed_amplitude_sweep(const std::string& model, const std::vector<double>& amplitudes,
                                            double alpha) {
  if (model != "sgn" && model != "esgn" && model != "euler")
    throw InvalidInput("speed_amplitude_sweep: unknown model '" + model + "'");
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] > amplitudes[i - 1])) throw InvalidInput("speed_amplitude_sweep: amplitudes must increase");
  std::vector<std::future<SweepRow>> jobs;
  for (double a : amplitudes) {
    jobs.push_back(std::async(std::launch::async, [=]() {
      SweepRow row;
      row.amplitude_ratio = a;
      try {
        if (model == "sgn") {
          row.speed_ratio = std::sqrt(1.0 + a);
        } else if (model == "esgn") {
          row.speed_ratio = esgn_solitary(a, alpha, 1.0, 1.0, {256, 0.0}).speed_ratio;
        } else {
          row.speed_ratio = babenko_solitary(a).speed_ratio;
        }
        row.ok = true;
      } catch (const std::exception& e) {
        row.message = e.what();
      }
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

}  // namespace hyplab
