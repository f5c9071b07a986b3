#include "hyplab/scalar_wb.hpp"

#include "hyplab/ode.hpp"

namespace hyplab {

void ScalarLaw::check_convexity(double lo, double hi, int samples) {
  if (!(hi > lo)) throw InvalidInput("check_convexity: empty state range");
  int sign = 0;
  const double h = 1e-4 * std::max(1.0, hi - lo);
  for (int i = 0; i < samples; ++i) {
    const double u = lo + (hi - lo) * i / (samples - 1);
    const double f2 = (flux_derivative(u + h) - flux_derivative(u - h)) / (2 * h);
    const int s = f2 > 1e-12 ? 1 : (f2 < -1e-12 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    if (s != sign) throw InvalidInput("flux is neither convex nor concave on the state range");
  }
  if (sign == 0) throw InvalidInput("flux is linear on the state range");
  convexity = sign;
}

ScalarLaw ScalarLaw::burgers() {
  ScalarLaw l;
  l.flux = [](double u) { return 0.5 * u * u; };
  l.flux_derivative = [](double u) { return u; };
  return l;
}

TempleState make_temple_state(double x_left, double x_right, int n_cells, const std::function<double(double)>& u0,
                              const ScalarLaw& law) {
  if (n_cells < 2 || !(x_right > x_left)) throw InvalidInput("make_temple_state: bad grid");
  TempleState s;
  s.dx = (x_right - x_left) / n_cells;
  s.x.resize(n_cells);
  s.u.resize(n_cells);
  s.a.resize(n_cells);
  for (int j = 0; j < n_cells; ++j) {
    s.x[j] = x_left + (j + 0.5) * s.dx;
    s.u[j] = u0(s.x[j]);
  }
  s.a[0] = 0.0;
  for (int j = 1; j < n_cells; ++j) {
    const double inc = adaptive_simpson(law.source_coefficient, s.x[j - 1], s.x[j], 1e-14);
    if (inc < -1e-14) throw InvalidInput("source coefficient must be nonnegative");
    s.a[j] = s.a[j - 1] + std::max(0.0, inc);
  }
  return s;
}

double steady_jump(double u_in, double delta_a, const ScalarLaw& law, double tol) {
  if (delta_a == 0.0) return u_in;
  const double side = law.flux_derivative(u_in);
  auto check = [&](double a, double u) {
    const double fp = law.flux_derivative(u);
    if (std::abs(fp) < law.eps_sonic || fp * side < 0)
      throw ResonanceError("steady_jump: sonic state u = " + std::to_string(u) + " at a = " + std::to_string(a), a,
                           u);
  };
  check(0.0, u_in);
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol * 1e-2;
  auto rhs = [&](double, double u) { return law.source(u) / law.flux_derivative(u); };
  return dopri45(rhs, u_in, 0.0, delta_a, o, check);
}

double riemann_state(double uL, double uR, const ScalarLaw& law) {
  if (law.convexity < 0) {
    ScalarLaw mirrored = law;
    mirrored.convexity = 1;
    mirrored.flux = [&law](double v) { return -law.flux(-v); };
    mirrored.flux_derivative = [&law](double v) { return law.flux_derivative(-v); };
    return -riemann_state(-uL, -uR, mirrored);
  }
  if (uL <= uR) {
    if (law.flux_derivative(uL) >= 0) return uL;
    if (law.flux_derivative(uR) <= 0) return uR;
    // sonic point f'(u) = 0 inside (uL, uR)
    return brent_root(law.flux_derivative, uL, uR, 1e-15);
  }
  const double s = (law.flux(uL) - law.flux(uR)) / (uL - uR);
  return s >= 0 ? uL : uR;
}

double godunov_flux(double uL, double uR, const ScalarLaw& law) { return law.flux(riemann_state(uL, uR, law)); }

InterfaceFlux wb_interface_flux(double uL, double uR, double delta_a, const ScalarLaw& law) {
  if (delta_a == 0.0) {
    const double F = godunov_flux(uL, uR, law);
    return {F, F};
  }
  if (law.flux_derivative(uL) > 0) {
    const double up = steady_jump(uL, delta_a, law);
    if (riemann_state(up, uR, law) == up) return {law.flux(uL), law.flux(up)};
  }
  if (law.flux_derivative(uR) < 0) {
    const double um = steady_jump(uR, -delta_a, law);
    if (riemann_state(uL, um, law) == um) return {law.flux(um), law.flux(uR)};
  }
  throw ResonanceError("wb_interface_flux: no admissible standing wave between u = " + std::to_string(uL) + " and " +
                           std::to_string(uR),
                       delta_a, uL);
}

double max_stable_dt(const TempleState& s, const ScalarLaw& law, double cfl) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < s.u.size(); ++j) m = std::max(m, std::abs(law.flux_derivative(s.u[j])));
  return m > 0 ? cfl * s.dx / m : std::numeric_limits<double>::infinity();
}

TempleState wb_godunov_step(const TempleState& s, const ScalarLaw& law, double dt, const StepOptions& opt) {
  if (!(dt > 0)) throw StepRejected("wb_godunov_step: dt must be positive");
  if (opt.cfl > 1.0) throw StepRejected("wb_godunov_step: cfl above 1");
  const double bound = max_stable_dt(s, law, opt.cfl);
  if (dt > bound * (1.0 + 1e-12))
    throw StepRejected("wb_godunov_step: CFL violated (dt = " + std::to_string(dt) + ", bound " +
                       std::to_string(bound) + ")");
  const Eigen::Index n = s.u.size();
  // interfaces -1/2 .. n-1/2 with outflow ghosts
  std::vector<InterfaceFlux> F(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const Eigen::Index l = std::max<Eigen::Index>(i - 1, 0), r = std::min<Eigen::Index>(i, n - 1);
    F[i] = wb_interface_flux(s.u[l], s.u[r], s.a[r] - s.a[l], law);
  }
  TempleState out = s;
  const double lam = dt / s.dx;
  for (Eigen::Index j = 0; j < n; ++j) out.u[j] = s.u[j] - lam * (F[j + 1].minus - F[j].plus);
  out.time = s.time + dt;
  return out;
}

TempleState run_to(TempleState s, const ScalarLaw& law, double t_end, const StepOptions& opt) {
  while (s.time < t_end) {
    double dt = max_stable_dt(s, law, opt.cfl);
    if (s.time + dt >= t_end) dt = t_end - s.time;
    s = wb_godunov_step(s, law, dt, opt);
    if (t_end - s.time < 1e-14 * std::max(1.0, t_end)) s.time = t_end;
  }
  return s;
}

TempleState chained_steady_state(double x_left, double x_right, int n_cells, double u_first, const ScalarLaw& law) {
  TempleState s = make_temple_state(x_left, x_right, n_cells, [](double) { return 0.0; }, law);
  s.u[0] = u_first;
  for (int j = 1; j < n_cells; ++j) s.u[j] = steady_jump(s.u[j - 1], s.a[j] - s.a[j - 1], law);
  return s;
}

double traffic_flux(double a, double u) { return 8.0 * a * u - u * u; }
double traffic_eigenvalue(double a, double u) { return 8.0 * a - 2.0 * u; }

double traffic_junction_flux(double aL, double uL, double aR, double uR) {
  // concave flux: demand of the upstream cell against supply of the downstream one
  const double demand = uL <= 4.0 * aL ? traffic_flux(aL, uL) : 16.0 * aL * aL;
  const double supply = uR <= 4.0 * aR ? 16.0 * aR * aR : traffic_flux(aR, uR);
  return std::min(demand, supply);
}

double bressan_resonant_left_state(double a_left, double a_right) {
  // 8 aL u - u^2 = 16 aR^2, smaller root
  const double disc = 64.0 * a_left * a_left - 64.0 * a_right * a_right;
  if (disc < 0) throw InvalidInput("bressan: left road cannot carry the right capacity");
  return 4.0 * a_left - 0.5 * std::sqrt(disc);
}

namespace {

struct TrafficRun {
  Vec u;
  long steps = 0;
  std::vector<Vec> eig;
};

TrafficRun traffic_run(const Vec& a, Vec u, double dx, const BressanOptions& opt, const std::vector<double>& snaps) {
  TrafficRun r;
  const Eigen::Index n = u.size();
  double t = 0.0;
  std::size_t next = 0;
  Vec F(n + 1);
  while (t < opt.t_end) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) m = std::max(m, std::abs(traffic_eigenvalue(a[j], u[j])));
    double dt = m > 0 ? opt.cfl * dx / m : opt.t_end - t;
    const double stop = next < snaps.size() ? snaps[next] : opt.t_end;
    if (t + dt >= stop) dt = stop - t;
    for (Eigen::Index i = 0; i <= n; ++i) {
      const Eigen::Index l = std::max<Eigen::Index>(i - 1, 0), rr = std::min<Eigen::Index>(i, n - 1);
      F[i] = traffic_junction_flux(a[l], u[l], a[rr], u[rr]);
    }
    for (Eigen::Index j = 0; j < n; ++j) u[j] -= dt / dx * (F[j + 1] - F[j]);
    t = (t + dt >= stop) ? stop : t + dt;
    ++r.steps;
    while (next < snaps.size() && t >= snaps[next]) {
      Vec e(n);
      for (Eigen::Index j = 0; j < n; ++j) e[j] = traffic_eigenvalue(a[j], u[j]);
      r.eig.push_back(e);
      ++next;
    }
  }
  r.u = u;
  return r;
}

}  // namespace

BressanReport bressan_demo(double a_left, double a_right, const std::function<double(double)>& u0,
                           const BressanOptions& opt) {
  if (!(a_left > 0 && a_right > 0)) throw InvalidInput("bressan_demo: lane counts must be positive");
  if (opt.n_cells < 4) throw InvalidInput("bressan_demo: too few cells");
  BressanReport rep;
  const int n = opt.n_cells;
  const double dx = (opt.x_right - opt.x_left) / n;
  rep.x.resize(n);
  rep.a.resize(n);
  Vec ub(n), up(n);
  for (int j = 0; j < n; ++j) {
    rep.x[j] = opt.x_left + (j + 0.5) * dx;
    rep.a[j] = rep.x[j] < 0 ? a_left : a_right;
    ub[j] = u0(rep.x[j]);
    up[j] = ub[j] - (rep.x[j] < 0 ? opt.delta : 0.0);
  }
  for (int i = 1; i <= opt.snapshots; ++i) rep.snapshot_times.push_back(opt.t_end * i / opt.snapshots);
  const TrafficRun base = traffic_run(rep.a, ub, dx, opt, rep.snapshot_times);
  const TrafficRun pert = traffic_run(rep.a, up, dx, opt, {});
  rep.u_base = base.u;
  rep.u_perturbed = pert.u;
  rep.eigenvalues = base.eig;
  rep.steps = base.steps;
  rep.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    rep.min_abs_eigenvalue = std::min(rep.min_abs_eigenvalue, std::abs(traffic_eigenvalue(rep.a[j], ub[j])));
  for (const Vec& e : rep.eigenvalues) rep.min_abs_eigenvalue = std::min(rep.min_abs_eigenvalue, e.cwiseAbs().minCoeff());
  rep.initial_distance = (up - ub).cwiseAbs().maxCoeff();
  rep.final_distance = (pert.u - base.u).cwiseAbs().maxCoeff();
  rep.sensitivity = rep.initial_distance > 0 ? rep.final_distance / rep.initial_distance : 0.0;
  rep.l1_sensitivity = (up - ub).cwiseAbs().sum() > 0
                           ? (pert.u - base.u).cwiseAbs().sum() / (up - ub).cwiseAbs().sum()
                           : 0.0;
  return rep;
}

}  // namespace hyplab
