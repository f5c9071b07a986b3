#include "hyplab/euler_poisson.hpp"

#include <algorithm>
#include <future>

namespace hyplab {

namespace {

Pair f2(double a, double b) { return euler_flux_t(a, b); }
double pos(double x) { return std::max(0.0, x); }
double neg(double x) { return std::min(0.0, x); }

struct Cell {
  double up, um;
};

Cell invariants(double rho, double m) {
  const double u = rho > 0 ? m / rho : 0.0;
  return {u + 0.5 * rho, u - 0.5 * rho};
}

double tau_at(const DeviceConfig& c, Eigen::Index l, Eigen::Index r) {
  const double tl = c.tau[l], tr = c.tau[r];
  if (std::isinf(tl) && std::isinf(tr)) return std::numeric_limits<double>::infinity();
  if (std::isinf(tl)) return tr;
  if (std::isinf(tr)) return tl;
  return 0.5 * (tl + tr);
}

}  // namespace

Vec MomentState::velocity() const {
  Vec u(rho.size());
  for (Eigen::Index j = 0; j < rho.size(); ++j) u[j] = rho[j] > 0 ? momentum[j] / rho[j] : 0.0;
  return u;
}
Vec MomentState::u_plus() const { return velocity() + 0.5 * rho; }
Vec MomentState::u_minus() const { return velocity() - 0.5 * rho; }

MomentState MomentState::from_invariants(const Vec& up, const Vec& um) {
  if (up.size() != um.size()) throw InvalidInput("from_invariants: size mismatch");
  if (((up - um).array() < 0).any()) throw InvalidInput("from_invariants: u+ < u- (negative density)");
  return {up - um, 0.5 * (up.cwiseAbs2() - um.cwiseAbs2())};
}

Vec DeviceConfig::centres() const {
  Vec x(n_cells);
  for (int j = 0; j < n_cells; ++j) x[j] = -1.0 + (j + 0.5) * dx();
  return x;
}

void DeviceConfig::validate() const {
  if (n_cells < 4) throw ConfigError("device: n_cells must be >= 4");
  if (doping.size() != n_cells || debye.size() != n_cells || tau.size() != n_cells)
    throw ConfigError("device: profiles must have n_cells samples");
  if ((doping.array() <= 0).any() || (doping.array() > 1).any()) throw ConfigError("device: doping must lie in (0, 1]");
  if ((debye.array() <= 0).any() || !debye.allFinite()) throw ConfigError("device: debye length must be > 0");
  if ((tau.array() <= 0).any()) throw ConfigError("device: tau must be > 0");
  if (!(doping_left > 0 && doping_right > 0)) throw ConfigError("device: boundary doping must be > 0");
  if (!(bias >= 0)) throw ConfigError("device: bias must be >= 0");
  if (!(cfl > 0 && cfl <= 1)) throw ConfigError("device: cfl must lie in (0, 1]");
}

double DeviceConfig::default_doping(double x) {
  const double a = std::abs(x);
  if (a >= 0.4) return 1.0;
  if (a <= 0.3) return 0.2;
  return 0.2 + 0.8 * (a - 0.3) / 0.1;
}

DeviceConfig DeviceConfig::standard(int n_cells, double lambda, double bias, double tau) {
  DeviceConfig c;
  c.n_cells = n_cells;
  const Vec x = c.centres();
  c.doping.resize(n_cells);
  for (int j = 0; j < n_cells; ++j) c.doping[j] = default_doping(x[j]);
  c.debye = Vec::Constant(n_cells, lambda);
  c.tau = Vec::Constant(n_cells, tau);
  c.doping_left = default_doping(-1.0);
  c.doping_right = default_doping(1.0);
  c.bias = bias;
  return c;
}

Pair euler_flux(double up, double um) {
  if (up < um) throw InvalidInput("euler_flux: u+ < u- (negative density)");
  return f2(up, um);
}

SplitFlux split_flux(double up, double um) {
  if (up < um) throw InvalidInput("split_flux: u+ < u- (negative density)");
  return {f2(pos(up), pos(um)), f2(neg(up), neg(um))};
}

WbFlux wb_interface_flux(double up_l, double um_l, double up_r, double um_r, double dphi) {
  const double s_neg = std::sqrt(pos(-2.0 * dphi));
  const double s_pos = std::sqrt(pos(2.0 * dphi));
  auto cross_r = [&](double v) { return std::sqrt(pos(pos(v) * pos(v) - 2.0 * dphi)); };
  auto cross_l = [&](double v) { return -std::sqrt(pos(neg(v) * neg(v) + 2.0 * dphi)); };
  WbFlux F;
  F.plus = f2(cross_r(up_l), cross_r(um_l)) - f2(std::min(pos(-up_r), s_neg), std::min(pos(-um_r), s_neg));
  F.minus = f2(cross_l(up_r), cross_l(um_r)) - f2(-std::min(pos(up_l), s_pos), -std::min(pos(um_l), s_pos));
  return F;
}

double augmented_jump(double delta_phi, double u_left, double u_right, double tau, double dx, bool literal) {
  if (!(tau > 0)) throw ConfigError("augmented_jump: tau must be > 0");
  if (std::isinf(tau)) return delta_phi;
  const double scale = literal ? 1.0 : dx;
  return delta_phi + scale / (2.0 * tau) * (u_left + u_right);
}

PotentialField poisson_solve(const Vec& rho, const DeviceConfig& config) {
  const int n = config.n_cells;
  if (rho.size() != n) throw InvalidInput("poisson_solve: rho size mismatch");
  if ((config.debye.array() <= 0).any()) throw ConfigError("poisson_solve: debye length must be > 0");
  if ((rho.array() < 0).any()) throw InvalidInput("poisson_solve: negative density");
  const double dx2 = config.dx() * config.dx();
  const double phiL = 0.0, phiR = -config.bias;
  // tridiagonal rows: lo phi_{j-1} + di phi_j + up phi_{j+1} = rhs
  Vec lo(n), di(n), up(n), rhs(n);
  for (int j = 0; j < n; ++j) {
    const double w = config.debye[j] / dx2;
    lo[j] = w;
    up[j] = w;
    di[j] = -2.0 * w;
    rhs[j] = config.doping[j] - rho[j];
  }
  di[0] -= lo[0];
  rhs[0] -= 2.0 * lo[0] * phiL;
  lo[0] = 0.0;
  di[n - 1] -= up[n - 1];
  rhs[n - 1] -= 2.0 * up[n - 1] * phiR;
  up[n - 1] = 0.0;
  // Thomas
  Vec c(n), d(n);
  c[0] = up[0] / di[0];
  d[0] = rhs[0] / di[0];
  for (int j = 1; j < n; ++j) {
    const double m = di[j] - lo[j] * c[j - 1];
    if (m == 0.0) throw ConfigError("poisson_solve: singular system");
    c[j] = up[j] / m;
    d[j] = (rhs[j] - lo[j] * d[j - 1]) / m;
  }
  PotentialField P;
  P.phi.resize(n);
  P.phi[n - 1] = d[n - 1];
  for (int j = n - 2; j >= 0; --j) P.phi[j] = d[j] - c[j] * P.phi[j + 1];
  P.phi_left = phiL;
  P.phi_right = phiR;
  double res = 0.0;
  for (int j = 0; j < n; ++j) {
    double r = di[j] * P.phi[j] - rhs[j];
    if (j > 0) r += lo[j] * P.phi[j - 1];
    if (j + 1 < n) r += up[j] * P.phi[j + 1];
    res = std::max(res, std::abs(r) * dx2 / config.debye[j]);
  }
  P.residual = res;
  const double dx = config.dx();
  P.e_field.resize(n + 1);
  P.e_field[0] = -(P.phi[0] - phiL) / (0.5 * dx);
  for (int j = 1; j < n; ++j) P.e_field[j] = -(P.phi[j] - P.phi[j - 1]) / dx;
  P.e_field[n] = -(phiR - P.phi[n - 1]) / (0.5 * dx);
  return P;
}

namespace {

struct Faces {
  std::vector<Pair> G_left;   // flux through the left face of each cell
  std::vector<Pair> G_right;  // flux through the right face
};

Faces face_fluxes(const MomentState& s, const PotentialField& P, const DeviceConfig& c) {
  const Eigen::Index n = s.size();
  const double dx = c.dx();
  std::vector<Cell> cells(n + 2);
  Vec phi(n + 2), u(n + 2);
  Vec tau(n + 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    cells[j + 1] = invariants(s.rho[j], s.momentum[j]);
    phi[j + 1] = P.phi[j];
  }
  // ghosts: boundary doping, extrapolated velocity, reflected potential
  const double u0 = s.rho[0] > 0 ? s.momentum[0] / s.rho[0] : 0.0;
  const double un = s.rho[n - 1] > 0 ? s.momentum[n - 1] / s.rho[n - 1] : 0.0;
  cells[0] = {u0 + 0.5 * c.doping_left, u0 - 0.5 * c.doping_left};
  cells[n + 1] = {un + 0.5 * c.doping_right, un - 0.5 * c.doping_right};
  phi[0] = 2.0 * P.phi_left - P.phi[0];
  phi[n + 1] = 2.0 * P.phi_right - P.phi[n - 1];

  Faces F;
  F.G_left.resize(n);
  F.G_right.resize(n);
  std::vector<SplitFlux> split(n + 2);
  for (Eigen::Index j = 0; j < n + 2; ++j) split[j] = split_flux(cells[j].up, cells[j].um);
  for (Eigen::Index i = 0; i <= n; ++i) {
    // interface between extended cells i and i+1
    const Cell& L = cells[i];
    const Cell& R = cells[i + 1];
    const Eigen::Index tl = std::clamp<Eigen::Index>(i - 1, 0, n - 1), tr = std::clamp<Eigen::Index>(i, 0, n - 1);
    const double dphi = augmented_jump(phi[i + 1] - phi[i], 0.5 * (L.up + L.um), 0.5 * (R.up + R.um),
                                       tau_at(c, tl, tr), dx, c.literal_damping);
    const WbFlux W = wb_interface_flux(L.up, L.um, R.up, R.um, dphi);
    if (i >= 1) F.G_right[i - 1] = W.minus + split[i].plus;
    if (i < n) F.G_left[i] = W.plus + split[i + 1].minus;
  }
  return F;
}

}  // namespace

double max_stable_dt(const MomentState& s, const DeviceConfig& config) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const Cell c = invariants(s.rho[j], s.momentum[j]);
    m = std::max({m, std::abs(c.up), std::abs(c.um)});
  }
  return m > 0 ? config.cfl * config.dx() / m : config.cfl * config.dx();
}

MomentState transport_step(const MomentState& s, const PotentialField& P, const DeviceConfig& config, double dt) {
  if (s.size() != config.n_cells || P.phi.size() != config.n_cells)
    throw InvalidInput("transport_step: size mismatch");
  if (!(dt > 0)) throw StepRejected("transport_step: dt must be positive");
  const double bound = max_stable_dt(s, config);
  if (dt > bound * (1.0 + 1e-12))
    throw StepRejected("transport_step: CFL violated (dt = " + std::to_string(dt) + ", bound " + std::to_string(bound) +
                       ")");
  const Faces F = face_fluxes(s, P, config);
  const double lam = dt / config.dx();
  MomentState out = s;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const Pair d = F.G_right[j] - F.G_left[j];
    out.rho[j] -= lam * d[0];
    out.momentum[j] -= lam * d[1];
    if (!std::isfinite(out.rho[j]) || !std::isfinite(out.momentum[j]))
      throw PositivityError("transport_step: non-finite state in cell " + std::to_string(j), long(j));
    if (out.rho[j] < 0.0) {
      if (out.rho[j] > -1e-14) {
        out.rho[j] = 0.0;
        out.momentum[j] = 0.0;
      } else {
        throw PositivityError("transport_step: negative density " + std::to_string(out.rho[j]) + " in cell " +
                                  std::to_string(j),
                              long(j));
      }
    }
  }
  return out;
}

MomentState device_step(const MomentState& s, PotentialField& phi, const DeviceConfig& config, double dt) {
  MomentState out = transport_step(s, phi, config, dt);
  phi = poisson_solve(out.rho, config);
  return out;
}

BoundaryFlux boundary_mass_flux(const MomentState& s, const PotentialField& phi, const DeviceConfig& config) {
  const Faces F = face_fluxes(s, phi, config);
  return {F.G_left.front()[0], F.G_right.back()[0]};
}

MomentState rest_state(const DeviceConfig& config) { return {config.doping, Vec::Zero(config.n_cells)}; }

DeviceRun run_to_steady(const MomentState& initial, const DeviceConfig& config, const SteadyOptions& opt) {
  config.validate();
  DeviceRun r;
  r.state = initial;
  r.potential = poisson_solve(initial.rho, config);
  int streak = 0;
  for (r.steps = 0; r.steps < opt.max_steps; ++r.steps) {
    const double dt = max_stable_dt(r.state, config);
    MomentState next = device_step(r.state, r.potential, config, dt);
    const double scale = std::max({1.0, r.state.rho.cwiseAbs().maxCoeff(), r.state.momentum.cwiseAbs().maxCoeff()});
    const double dm = std::max((next.rho - r.state.rho).cwiseAbs().maxCoeff(),
                               (next.momentum - r.state.momentum).cwiseAbs().maxCoeff());
    r.residual = dm / (dt * scale);
    r.state = std::move(next);
    r.time += dt;
    streak = r.residual < opt.tol ? streak + 1 : 0;
    if (streak >= opt.consecutive) {
      r.converged = true;
      ++r.steps;
      break;
    }
  }
  return r;
}

Vec mach_number(const MomentState& s) {
  Vec m(s.size());
  const Vec u = s.velocity();
  for (Eigen::Index j = 0; j < s.size(); ++j) m[j] = s.rho[j] > 0 ? 2.0 * u[j] / s.rho[j] : 0.0;
  return m;
}

int count_sonic_points(const MomentState& s) {
  const Vec u = s.velocity();
  int count = 0;
  for (Eigen::Index j = 0; j + 1 < s.size(); ++j) {
    const double a = std::abs(u[j]) - 0.5 * s.rho[j];
    const double b = std::abs(u[j + 1]) - 0.5 * s.rho[j + 1];
    if ((a > 0) != (b > 0)) ++count;
  }
  return count;
}

int count_sonic_shocks(const MomentState& s) {
  const Vec u = s.velocity();
  int count = 0;
  for (Eigen::Index j = 0; j + 1 < s.size(); ++j) {
    const bool sup_l = std::abs(u[j]) > 0.5 * s.rho[j];
    const bool sup_r = std::abs(u[j + 1]) > 0.5 * s.rho[j + 1];
    const bool rightward = u[j] + u[j + 1] > 0;
    if (rightward ? (sup_l && !sup_r) : (sup_r && !sup_l)) ++count;
  }
  return count;
}

std::vector<IvRow> iv_curve(const DeviceConfig& config, const std::vector<double>& biases, const SteadyOptions& opt) {
  std::vector<std::future<IvRow>> jobs;
  for (double V : biases) {
    jobs.push_back(std::async(std::launch::async, [config, V, opt]() {
      IvRow row;
      row.bias = V;
      try {
        DeviceConfig c = config;
        c.bias = V;
        const DeviceRun run = run_to_steady(rest_state(c), c, opt);
        std::vector<double> j(run.state.momentum.data(), run.state.momentum.data() + run.state.size());
        std::nth_element(j.begin(), j.begin() + j.size() / 2, j.end());
        double med = j[j.size() / 2];
        if (j.size() % 2 == 0) {
          const double lower = *std::max_element(j.begin(), j.begin() + j.size() / 2);
          med = 0.5 * (med + lower);
        }
        row.current = med;
        row.oscillation = run.state.momentum.maxCoeff() - run.state.momentum.minCoeff();
        row.sonic_points = count_sonic_points(run.state);
        row.sonic_shocks = count_sonic_shocks(run.state);
        row.converged = run.converged;
        row.steps = run.steps;
        if (!run.converged) row.message = "steady state not reached (residual " + std::to_string(run.residual) + ")";
      } catch (const std::exception& e) {
        row.message = e.what();
      }
      return row;
    }));
  }
  std::vector<IvRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

}  // namespace hyplab
