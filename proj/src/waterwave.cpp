#include "hyplab/waterwave.hpp"

#include <algorithm>
#include <mutex>

#include "hyplab/lab.hpp"
#include "hyplab/ode.hpp"

namespace hyplab {

namespace {

// Multipliers on the base grid and on the 3/2 padded grid.
struct ConformalOps {
  int n = 0;
  double length = 0.0, h0 = 0.0;
  CVec D, H, S;  // base grid
  CVec HM;       // padded grid
  int M = 0;
};

const ConformalOps& ops_for(const PeriodicGrid& grid, double h0) {
  thread_local ConformalOps ops;
  if (ops.n == grid.size() && ops.length == grid.length() && ops.h0 == h0) return ops;
  if (grid.size() % 2 != 0) throw InvalidInput("conformal solver: even number of points required");
  ops.n = grid.size();
  ops.length = grid.length();
  ops.h0 = h0;
  ops.D = derivative_symbol(1).multipliers(grid);
  ops.H = hilbert_symbol(h0).multipliers(grid);
  ops.S = strip_symbol(h0).multipliers(grid);
  ops.M = 3 * ops.n / 2;
  ops.HM = hilbert_symbol(h0).multipliers(PeriodicGrid(ops.M, grid.length()));
  return ops;
}

Vec pad(const CVec& fh, int M) {
  const int n = int(fh.size());
  CVec p = CVec::Zero(M);
  const double up = double(M) / n;
  for (int j = 0; j < n / 2; ++j) p[j] = fh[j] * up;
  for (int j = 1; j < n / 2; ++j) p[M - j] = fh[n - j] * up;
  return fft_inverse(p);
}

Vec truncate(const Vec& f, int n) {
  const int M = int(f.size());
  const CVec fh = fft_forward(f);
  CVec o = CVec::Zero(n);
  const double down = double(n) / M;
  for (int j = 0; j < n / 2; ++j) o[j] = fh[j] * down;
  for (int j = 1; j < n / 2; ++j) o[n - j] = fh[M - j] * down;
  return fft_inverse(o);
}

Vec times(const CVec& m, const CVec& fh) { return fft_inverse(CVec(m.cwiseProduct(fh))); }

struct SurfaceKinematics {
  Vec gx, px, sx, cx, J;
};

SurfaceKinematics kinematics(const ConformalSurfaceState& s) {
  const auto& op = ops_for(s.gamma.grid, s.h0);
  const CVec gh = fft_forward(s.gamma.samples);
  const CVec ph = fft_forward(s.phi_s.samples);
  const CVec gxh = op.D.cwiseProduct(gh);
  const CVec pxh = op.D.cwiseProduct(ph);
  SurfaceKinematics k;
  k.gx = fft_inverse(gxh);
  k.px = fft_inverse(pxh);
  k.sx = times(op.S, pxh);
  k.cx = Vec::Ones(op.n) - times(op.H, gxh);
  k.J = k.cx.cwiseAbs2() + k.gx.cwiseAbs2();
  return k;
}

}  // namespace

ConformalSurfaceState::ConformalSurfaceState(RealField gamma_, RealField phi_, double h0_, double g_)
    : gamma(std::move(gamma_)), phi_s(std::move(phi_)), h0(h0_), g(g_) {
  if (gamma.grid != phi_s.grid) throw InvalidInput("ConformalSurfaceState: grid mismatch");
  if (!(h0 > 0 && g > 0)) throw InvalidInput("ConformalSurfaceState: h0 and g must be positive");
}

ConformalRhs conformal_rhs(const ConformalSurfaceState& s, double j_min) {
  const auto& op = ops_for(s.gamma.grid, s.h0);
  require_finite(s.gamma.samples, "conformal_rhs");
  require_finite(s.phi_s.samples, "conformal_rhs");
  const int M = op.M;
  const CVec gh = fft_forward(s.gamma.samples);
  const CVec ph = fft_forward(s.phi_s.samples);
  const CVec gxh = op.D.cwiseProduct(gh);
  const CVec pxh = op.D.cwiseProduct(ph);

  const Vec gx = pad(gxh, M);
  const Vec px = pad(pxh, M);
  const Vec sx = pad(CVec(op.S.cwiseProduct(pxh)), M);
  const Vec cx = Vec::Ones(M) - pad(CVec(op.H.cwiseProduct(gxh)), M);
  const Vec J = cx.cwiseAbs2() + gx.cwiseAbs2();

  ConformalRhs r;
  r.min_jacobian = J.minCoeff();
  if (!(r.min_jacobian >= j_min))
    throw SurfaceFolding("conformal map degenerate: min J = " + std::to_string(r.min_jacobian));

  const Vec q = sx.cwiseQuotient(J);
  const Vec Hq = times(op.HM, fft_forward(q));  // zero mode of H is 0: mean of q is dropped
  const Vec gt = gx.cwiseProduct(Hq) - cx.cwiseProduct(q);
  const Vec pt = 0.5 * (sx.cwiseAbs2() - px.cwiseAbs2()).cwiseQuotient(J) - s.g * pad(gh, M) + px.cwiseProduct(Hq);
  r.chi0_t = (cx.cwiseProduct(Hq) + gx.cwiseProduct(q)).mean();
  r.gamma_t = truncate(gt, op.n);
  r.phi_t = truncate(pt, op.n);
  r.max_speed = ((px.cwiseAbs2() + sx.cwiseAbs2()).cwiseQuotient(J)).cwiseSqrt().maxCoeff();
  return r;
}

ConservedQuantities conserved(const ConformalSurfaceState& s) {
  const auto k = kinematics(s);
  const double dx = s.gamma.grid.spacing();
  const Vec& gam = s.gamma.samples;
  ConservedQuantities c;
  c.mass = gam.dot(k.cx) * dx;
  c.energy = 0.5 * s.phi_s.samples.dot(k.sx) * dx + 0.5 * s.g * gam.cwiseAbs2().dot(k.cx) * dx;
  return c;
}

CrestInfo locate_crest(const ConformalSurfaceState& s) {
  const auto& op = ops_for(s.gamma.grid, s.h0);
  const PeriodicGrid& grid = s.gamma.grid;
  const CVec gh = fft_forward(s.gamma.samples);
  Eigen::Index imax;
  s.gamma.samples.maxCoeff(&imax);
  double xi = grid.nodes()[imax];
  const double dx = grid.spacing();
  for (int it = 0; it < 50; ++it) {
    const auto v = trig_interpolate(gh, grid, xi);
    if (v.d2 == 0.0) break;
    const double step = std::clamp(v.d1 / v.d2, -dx, dx);
    xi -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(xi))) break;
  }
  CrestInfo c;
  c.xi = xi;
  c.elevation = trig_interpolate(gh, grid, xi).value;
  const CVec Xh = -op.H.cwiseProduct(gh);
  c.x = xi + trig_interpolate(Xh, grid, xi).value + s.chi0;
  const auto k = kinematics(s);
  const Eigen::Index far = (imax + grid.size() / 2) % grid.size();
  c.far_elevation = s.gamma.samples[far];
  c.far_velocity = (k.px[far] * k.cx[far] + k.sx[far] * k.gx[far]) / k.J[far];
  return c;
}

double spectral_tail(const Vec& f) {
  const Eigen::Index n = f.size();
  const CVec fh = fft_forward(f);
  double peak = 0.0, tail = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    const Eigen::Index m = j <= n / 2 ? j : n - j;
    const double a = std::abs(fh[j]);
    peak = std::max(peak, a);
    if (m >= 3 * n / 8) tail = std::max(tail, a);
  }
  return peak > 0 ? tail / peak : 0.0;
}

double Trajectory::mass_drift() const {
  double m = 0.0;
  const double ref = std::max(std::abs(mass.front()), 1e-300);
  for (double v : mass) m = std::max(m, std::abs(v - mass.front()) / ref);
  return m;
}

double Trajectory::energy_drift() const {
  double m = 0.0;
  const double ref = std::max(std::abs(energy.front()), 1e-300);
  for (double v : energy) m = std::max(m, std::abs(v - energy.front()) / ref);
  return m;
}

Trajectory evolve(const ConformalSurfaceState& s0, double t_end, const EvolveOptions& opt) {
  if (!(t_end >= s0.time)) throw InvalidInput("evolve: t_end before the initial time");
  for (const Vec* f : {&s0.gamma.samples, &s0.phi_s.samples})
    if (spectral_tail(*f) > opt.initial_tail)
      throw ResolutionError("evolve: initial data under-resolved (spectral tail " +
                            std::to_string(spectral_tail(*f)) + ")");
  std::vector<double> targets;
  for (double t : opt.snapshot_times)
    if (t > s0.time && t < t_end) targets.push_back(t);
  std::sort(targets.begin(), targets.end());
  targets.push_back(t_end);

  Trajectory tr(s0);
  ConformalSurfaceState s = s0;
  auto record = [&]() {
    const auto c = conserved(s);
    tr.times.push_back(s.time);
    tr.mass.push_back(c.mass);
    tr.energy.push_back(c.energy);
  };
  record();
  const double dxi = s.gamma.grid.spacing();
  const double c0 = std::sqrt(s.g * s.h0);

  ConformalSurfaceState tmp = s;
  auto stage = [&](const ConformalRhs& k, double h) {
    tmp.gamma.samples = s.gamma.samples + h * k.gamma_t;
    tmp.phi_s.samples = s.phi_s.samples + h * k.phi_t;
    tmp.chi0 = s.chi0 + h * k.chi0_t;
    return conformal_rhs(tmp, opt.j_min);
  };

  for (double target : targets) {
    while (s.time < target) {
      const ConformalRhs k1 = conformal_rhs(s, opt.j_min);
      const double bound = opt.dt_fixed > 0 ? opt.dt_fixed : opt.courant * dxi / (k1.max_speed + c0);
      const double remaining = target - s.time;
      const long n_sub = std::max<long>(1, long(std::ceil(remaining / bound - 1e-9)));
      const double dt = remaining / n_sub;
      const ConformalRhs k2 = stage(k1, 0.5 * dt);
      const ConformalRhs k3 = stage(k2, 0.5 * dt);
      const ConformalRhs k4 = stage(k3, dt);
      s.gamma.samples += dt / 6.0 * (k1.gamma_t + 2.0 * k2.gamma_t + 2.0 * k3.gamma_t + k4.gamma_t);
      s.phi_s.samples += dt / 6.0 * (k1.phi_t + 2.0 * k2.phi_t + 2.0 * k3.phi_t + k4.phi_t);
      s.chi0 += dt / 6.0 * (k1.chi0_t + 2.0 * k2.chi0_t + 2.0 * k3.chi0_t + k4.chi0_t);
      s.time = n_sub == 1 ? target : s.time + dt;
      ++tr.steps;
      if (opt.diagnostics_every > 0 && tr.steps % opt.diagnostics_every == 0) {
        record();
        const double tail = std::max(spectral_tail(s.gamma.samples), spectral_tail(s.phi_s.samples));
        if (tail > opt.tail_growth)
          throw ResolutionError("evolve: spectral tail grew to " + std::to_string(tail) + " at t = " +
                                std::to_string(s.time));
      }
    }
    if (target != t_end) tr.snapshots.push_back(s);
  }
  if (tr.times.back() != s.time) record();
  tr.snapshots.push_back(s);
  tr.final_state = s;
  return tr;
}

PetviashviliResult petviashvili_solve(const DiagonalSymbol& L, const std::function<Vec(const Vec&)>& N,
                                      const RealField& guess, double gamma_exp, const PetviashviliOptions& opt) {
  require_finite(guess.samples, "petviashvili_solve");
  const CVec Lm = L.multipliers(guess.grid);
  for (Eigen::Index j = 1; j < Lm.size(); ++j)
    if (std::abs(Lm[j]) == 0.0) throw InvalidInput("petviashvili_solve: operator not invertible on mean-free fields");
  PetviashviliResult r{guess, 0, 0.0, 0.0, {}};
  Vec u = guess.samples;
  auto stabilizer = [&](const Vec& v, Vec& Nv) {
    Nv = N(v);
    const double num = apply_multipliers(v, Lm).dot(v);
    const double den = Nv.dot(v);
    if (!(std::isfinite(num) && std::isfinite(den)) || den == 0.0)
      throw ConvergenceError("petviashvili_solve: stabilizing factor undefined (<N(u),u> = " + std::to_string(den) +
                             ") after " + std::to_string(r.iterations) + " iterations");
    return num / den;
  };
  Vec Nu;
  const double scale0 = u.cwiseAbs().maxCoeff();
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double S = stabilizer(u, Nu);
    r.trace.push_back(S);
    CVec nh = fft_forward(Nu);
    for (Eigen::Index j = 0; j < nh.size(); ++j) nh[j] = Lm[j] == 0.0 ? cplx(0.0) : nh[j] / Lm[j];
    Vec next = std::pow(S, gamma_exp) * fft_inverse(nh);
    const double nmax = next.cwiseAbs().maxCoeff();
    r.iterations = it + 1;
    if (!next.allFinite() || nmax > 1e12 * std::max(scale0, 1.0) || !(S > 0.0)) {
      std::string tail;
      for (std::size_t i = r.trace.size() > 5 ? r.trace.size() - 5 : 0; i < r.trace.size(); ++i)
        tail += " " + std::to_string(r.trace[i]);
      throw ConvergenceError("petviashvili_solve: divergence at iteration " + std::to_string(it + 1) +
                             ", recent S:" + tail);
    }
    r.update = (next - u).cwiseAbs().maxCoeff() / std::max(nmax, 1e-300);
    u = std::move(next);
    if (r.update < opt.tol) break;
  }
  r.stabilizer = stabilizer(u, Nu);
  if (std::abs(r.stabilizer - 1.0) > 1e-12 && r.update >= opt.tol)
    throw ConvergenceError("petviashvili_solve: no convergence in " + std::to_string(r.iterations) +
                           " iterations (update " + std::to_string(r.update) + ", S = " +
                           std::to_string(r.stabilizer) + ")");
  r.u = RealField(guess.grid, u);
  return r;
}

namespace {

struct PeriodicBabenko {
  double ctilde2;
  Vec gamma;
  int iterations;
  double gamma_inf, d, a, F, q;
};

PeriodicBabenko babenko_periodic(double ctilde2, const PeriodicGrid& grid, double g, double h0, const Vec* guess) {
  const CVec C0 = dtn_symbol(h0, true).multipliers(grid);
  Vec e;
  if (guess) {
    e = *guess;
  } else {
    const double a0 = (ctilde2 / (g * h0) - 1.0) * h0;
    if (!(a0 > 0.0)) throw InvalidInput("babenko: supercritical speed required");
    const double kap = std::sqrt(3.0 * a0 / (h0 * h0 * (h0 + a0)));
    e = RealField::from_function(grid, [&](double x) {
          const double s = 1.0 / std::cosh(0.5 * kap * x);
          return a0 * s * s;
        }).samples;
    e.array() -= e.mean();
  }
  DiagonalSymbol L{[ctilde2, g, h0](double k) { return cplx(ctilde2 * k / std::tanh(k * h0) - g, 0.0); }, -g,
                   false, "babenko"};
  auto N = [&](const Vec& v) {
    const Vec Cv = apply_multipliers(v, C0);
    Vec vCv = v.cwiseProduct(Cv);
    vCv.array() -= vCv.mean();
    return Vec(g * (0.5 * apply_multipliers(Vec(v.cwiseAbs2()), C0) + vCv));
  };
  PetviashviliOptions po;
  po.tol = 1e-14;
  const auto r = petviashvili_solve(L, N, RealField(grid, e), 2.0, po);
  PeriodicBabenko b;
  b.ctilde2 = ctilde2;
  b.gamma = r.u.samples;
  b.iterations = r.iterations;
  const Vec Ce = apply_multipliers(b.gamma, C0);
  b.gamma_inf = b.gamma[0];
  b.d = h0 + b.gamma_inf;
  b.a = b.gamma.maxCoeff() - b.gamma_inf;
  const double c2 = ctilde2 - 2.0 * g * b.gamma_inf;
  if (!(c2 > 0.0 && b.d > 0.0)) throw ConvergenceError("babenko: unphysical periodic solution");
  const double cphys = std::sqrt(c2);
  b.F = cphys / std::sqrt(g * b.d);
  b.q = cphys * (1.0 + Ce[0]);
  return b;
}

// kd solving tan(kd)/(kd) = F^2 on (0, pi/2)
double tail_rate(double F, double d) {
  const double F2 = F * F;
  const double x = brent_root([&](double x) { return std::tan(x) / x - F2; }, 1e-8, 0.5 * M_PI - 1e-12, 1e-14);
  return x / d;
}

}  // namespace

BabenkoWave babenko_wave(double amplitude_ratio, const BabenkoOptions& opt) {
  if (!(amplitude_ratio > 0.0 && amplitude_ratio <= 0.75))
    throw InvalidInput("babenko_solitary: amplitude ratio must lie in (0, 0.75]");
  if (opt.n_points % 2 != 0) throw InvalidInput("babenko_solitary: n_points must be even");
  const double g = opt.g, h0 = opt.h0;
  double L = opt.window;
  if (!(L > 0.0)) {
    const double kap = tail_rate(1.0 + 0.5 * amplitude_ratio, h0);
    L = 2.0 * std::log(4.0 * amplitude_ratio / 1e-14) / kap;
  }
  const PeriodicGrid grid(opt.n_points, L, -0.5 * L);

  auto solve_at = [&](double target, const PeriodicBabenko* seed) {
    double c0 = seed ? seed->ctilde2 : g * h0 * (1.0 + target);
    PeriodicBabenko r0 = babenko_periodic(c0, grid, g, h0, seed ? &seed->gamma : nullptr);
    double f0 = r0.a / r0.d - target;
    double c1 = c0 * (1.0 + 1e-3 * (f0 > 0 ? -1.0 : 1.0));
    PeriodicBabenko r1 = babenko_periodic(c1, grid, g, h0, &r0.gamma);
    double f1 = r1.a / r1.d - target;
    int total = r0.iterations + r1.iterations;
    for (int i = 0; i < 60 && std::abs(f1) > opt.amplitude_tol; ++i) {
      if (f1 == f0) throw ConvergenceError("babenko: amplitude secant stalled");
      const double c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
      c0 = c1;
      f0 = f1;
      c1 = c2;
      r1 = babenko_periodic(c1, grid, g, h0, &r1.gamma);
      f1 = r1.a / r1.d - target;
      total += r1.iterations;
    }
    if (std::abs(f1) > opt.amplitude_tol)
      throw ConvergenceError("babenko: amplitude not matched (mismatch " + std::to_string(f1) + ")");
    r1.iterations = total;
    return r1;
  };

  PeriodicBabenko b;
  try {
    b = solve_at(amplitude_ratio, nullptr);
  } catch (const ConvergenceError&) {
    // continuation upward from a small amplitude
    PeriodicBabenko prev = solve_at(std::min(0.1, 0.5 * amplitude_ratio), nullptr);
    const double a_start = prev.a / prev.d;
    const int steps = std::max(2, int(std::ceil((amplitude_ratio - a_start) / 0.05)));
    for (int i = 1; i <= steps; ++i) prev = solve_at(a_start + (amplitude_ratio - a_start) * i / steps, &prev);
    b = prev;
  }

  // tail check: elevation near the window edge relative to the far field
  double tail = 0.0;
  for (int j = 0; j < grid.size(); ++j)
    if (std::abs(grid.nodes()[j]) >= 0.45 * L) tail = std::max(tail, std::abs(b.gamma[j] - b.gamma_inf));
  if (tail / b.d > opt.window_tail)
    throw WindowError("babenko_solitary: window too short, tail " + csv_number(tail / b.d) + " at the boundary");

  BabenkoWave w{SolitaryWave(grid), RealField(grid, b.gamma), b.ctilde2, b.gamma_inf, b.q};
  w.wave.amplitude_ratio = b.a / b.d;
  w.wave.speed_ratio = b.F;
  w.wave.d = b.d;
  w.wave.g = g;
  w.wave.speed = b.F * std::sqrt(g * b.d);
  w.wave.profile = RealField(grid, b.gamma.array() - b.gamma_inf);
  w.wave.abscissa = grid.nodes() - apply_multipliers(b.gamma, hilbert_symbol(h0).multipliers(grid));
  w.wave.source_model = WaveModel::full_euler;
  w.wave.iterations = b.iterations;
  return w;
}

SolitaryWave babenko_solitary(double amplitude_ratio, double window, int n_points) {
  BabenkoOptions o;
  o.window = window;
  o.n_points = n_points;
  return babenko_wave(amplitude_ratio, o).wave;
}

ConformalSurfaceState babenko_initial_state(const BabenkoWave& w, double g) {
  const PeriodicGrid& grid = w.gamma.grid;
  const double h0 = w.wave.d - w.gamma_inf;
  const CVec C0 = dtn_symbol(h0, true).multipliers(grid);
  const CVec D = derivative_symbol(1).multipliers(grid);
  CVec ph = fft_forward(Vec(w.q * apply_multipliers(w.gamma.samples, C0)));
  for (Eigen::Index j = 0; j < ph.size(); ++j) ph[j] = D[j] == 0.0 ? cplx(0.0) : ph[j] / D[j];
  ConformalSurfaceState s(w.gamma, RealField(grid, fft_inverse(ph)), h0, g);
  return s;
}

}  // namespace hyplab
