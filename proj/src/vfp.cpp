#include "hyplab/vfp.hpp"

#include <Eigen/SVD>
#include <array>
#include <future>
#include <thread>

#include "hyplab/quadrature.hpp"
#include "hyplab/scalar_wb.hpp"

namespace hyplab {

void VfpParams::validate() const {
  if (!(kappa > 0) || !std::isfinite(kappa)) throw InvalidInput("VfpParams: kappa must be positive");
  if (!std::isfinite(u)) throw InvalidInput("VfpParams: u must be finite");
  if (n_modes < 1) throw InvalidInput("VfpParams: n_modes must be >= 1");
}

double vfp_eigenvalue(int n, int sign, const VfpParams& p) {
  if (n < 0) throw InvalidInput("vfp_eigenvalue: n must be >= 0");
  if (sign != 1 && sign != -1) throw InvalidInput("vfp_eigenvalue: sign must be +1 or -1");
  if (n == 0) return (sign > 0 ? -std::min(p.u, 0.0) : -std::max(p.u, 0.0)) / p.kappa + 0.0;  // no -0
  return (-p.u + sign * std::sqrt(p.u * p.u + 4.0 * p.kappa * n)) / (2.0 * p.kappa);
}

double translated_velocity(int n, int sign, double v, const VfpParams& p) {
  return (v - 2.0 * vfp_eigenvalue(n, sign, p) * p.kappa - p.u) / std::sqrt(2.0 * p.kappa);
}

double vfp_mode(int n, int sign, double x, double v, const VfpParams& p) {
  if (n < 0) throw InvalidInput("vfp_mode: n must be >= 0");
  return vfp_mode_t<double>(n, sign, x, v, p);
}

double vfp_linear_mode(double x, double v, const VfpParams& p) {
  return (x - v) * std::exp(-v * v / (2.0 * p.kappa));
}

namespace {

// Eighth-order central weights for the first and second derivative.
constexpr std::array<double, 4> kD1{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr std::array<double, 4> kD2{8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
constexpr double kD2c = -205.0 / 72.0;

}  // namespace

double mode_residual(int n, int sign, const VfpParams& p, double h, double x_lo, double x_hi, double v_lo,
                     double v_hi) {
  p.validate();
  if (!(h > 0)) throw InvalidInput("mode_residual: h must be positive");
  const int nx = static_cast<int>(std::round((x_hi - x_lo) / h)), nv = static_cast<int>(std::round((v_hi - v_lo) / h));
  auto psi = [&](double x, double v) { return vfp_mode(n, sign, x, v, p); };
  double res = 0.0, scale = 0.0;
  for (int i = 0; i <= nx; ++i) {
    const double x = x_lo + i * h;
    for (int j = 0; j <= nv; ++j) {
      const double v = v_lo + j * h;
      const double f = psi(x, v);
      double fx = 0.0, fv = 0.0, fvv = kD2c * f;
      for (int m = 1; m <= 4; ++m) {
        fx += kD1[m - 1] * (psi(x + m * h, v) - psi(x - m * h, v));
        const double vp = psi(x, v + m * h), vm = psi(x, v - m * h);
        fv += kD1[m - 1] * (vp - vm);
        fvv += kD2[m - 1] * (vp + vm);
      }
      fx /= h;
      fv /= h;
      fvv /= h * h;
      const double lf = v * fx + (p.u - v) * fv - f - p.kappa * fvv;
      res = std::max(res, std::abs(lf));
      scale = std::max(scale, std::abs(f));
    }
  }
  return scale > 0 ? res / scale : res;
}

double ModeColumn::operator()(double x, double v, const VfpParams& p) const {
  switch (kind) {
    case linear:
      return vfp_linear_mode(x - shift, v, p);
    case difference:
    {
      // Psi_0^- / Psi_0^+ = exp(|u| (x - v) / kappa)
      const double a = std::abs(p.u), xs = x - shift;
      return p.kappa * vfp_mode(0, 1, xs, v, p) * std::expm1(a * (xs - v) / p.kappa) / a;
    }
    default:
      return vfp_mode(n, sign, x - shift, v, p);
  }
}

std::string ModeColumn::label() const {
  if (kind == linear) return "lin0";
  if (kind == difference) return "diff0";
  if (n == 0) return sign > 0 ? "alpha" : "beta";
  return (sign > 0 ? "A" : "B") + std::to_string(n);
}

VfpBasis::VfpBasis(const VfpParams& p, double len, DegenerateMode degenerate) : params(p), length(len) {
  p.validate();
  if (!(len > 0)) throw InvalidInput("VfpBasis: cell length must be positive");
  const int N = p.n_modes;
  mu_plus.resize(N + 1);
  mu_minus.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    mu_plus[n] = vfp_eigenvalue(n, 1, p);
    mu_minus[n] = vfp_eigenvalue(n, -1, p);
  }
  columns.push_back({0, 1, ModeColumn::psi, 0.0});
  if (p.u != 0.0) {
    columns.push_back({0, -1, ModeColumn::difference, 0.0});
  } else if (degenerate == DegenerateMode::linear_response) {
    columns.push_back({0, -1, ModeColumn::linear, 0.0});
  } else {
    rank_reduced = true;
  }
  for (int n = 1; n <= N; ++n) {
    columns.push_back({n, 1, ModeColumn::psi, 0.0});
    columns.push_back({n, -1, ModeColumn::psi, len});
  }
}

VelocityGrid VelocityGrid::hermite(int n_nodes, double kappa) {
  if (n_nodes < 2 || n_nodes % 2) throw InvalidInput("VelocityGrid: node count must be even and >= 2");
  if (!(kappa > 0)) throw InvalidInput("VelocityGrid: kappa must be positive");
  const GaussRule r = gauss_hermite(n_nodes);
  VelocityGrid g;
  const double s = std::sqrt(2.0 * kappa);
  g.y = r.nodes;
  g.scaled_weights = r.scaled_weights;
  g.v = s * r.nodes;
  g.weights = s * r.scaled_weights;
  g.kappa = kappa;
  for (int j = 0; j < n_nodes; ++j) (g.v[j] > 0 ? g.positive : g.negative).push_back(j);
  return g;
}

namespace {

// Weighted, column-normalised collocation of the basis on the half-range traces.
struct Collocation {
  Mat e_in, e_out;  // raw mode values, rows [v>0 ; v<0]
  Vec row_weight;   // sqrt of quadrature weights
  Vec col_scale;
  Mat pinv;  // coefficients (natural units) = pinv * incoming
  double condition = 0.0;
};

Collocation collocate(const VfpBasis& b, const VelocityGrid& g) {
  const auto m = static_cast<Eigen::Index>(g.positive.size() + g.negative.size());
  const auto nc = static_cast<Eigen::Index>(b.columns.size());
  Collocation c;
  c.e_in.resize(m, nc);
  c.e_out.resize(m, nc);
  c.row_weight.resize(m);
  const double L = b.length;
  for (Eigen::Index k = 0; k < nc; ++k) {
    const ModeColumn& col = b.columns[k];
    Eigen::Index r = 0;
    for (int j : g.positive) {
      c.e_in(r, k) = col(0.0, g.v[j], b.params);
      c.e_out(r, k) = col(L, g.v[j], b.params);
      c.row_weight[r++] = std::sqrt(g.weights[j]);
    }
    for (int j : g.negative) {
      c.e_in(r, k) = col(L, g.v[j], b.params);
      c.e_out(r, k) = col(0.0, g.v[j], b.params);
      c.row_weight[r++] = std::sqrt(g.weights[j]);
    }
  }
  if (!c.e_in.allFinite() || !c.e_out.allFinite()) throw TruncationError("collocation: non-finite mode values");
  Mat a = c.row_weight.asDiagonal() * c.e_in;
  c.col_scale = a.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < nc; ++k) {
    if (!(c.col_scale[k] > 0)) throw TruncationError("collocation: mode " + b.columns[k].label() + " vanishes on the grid");
    a.col(k) /= c.col_scale[k];
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  c.condition = s[0] / s[s.size() - 1];
  if (!(c.condition <= kCollocationConditionMax))
    throw TruncationError("collocation condition " + std::to_string(c.condition) +
                          " above 1e12: reduce n_modes or enlarge L * mu_1");
  const Mat apinv = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  c.pinv = c.col_scale.cwiseInverse().asDiagonal() * apinv * c.row_weight.asDiagonal();
  return c;
}

Vec stack_incoming(const Vec& left, const Vec& right, const VelocityGrid& g) {
  if (left.size() != static_cast<Eigen::Index>(g.positive.size()) ||
      right.size() != static_cast<Eigen::Index>(g.negative.size()))
    throw InvalidInput("half-range data size does not match the velocity grid");
  Vec in(left.size() + right.size());
  in << left, right;
  require_finite(in, "incoming half-range data");
  return in;
}

}  // namespace

Decomposition half_range_decompose(const Vec& in_left, const Vec& in_right, const VfpBasis& basis,
                                   const VelocityGrid& grid) {
  const Vec in = stack_incoming(in_left, in_right, grid);
  const Collocation c = collocate(basis, grid);
  Decomposition d;
  d.coefficients = c.pinv * in;
  d.alpha = d.coefficients[0];
  if (basis.columns.size() > 1 && basis.columns[1].n == 0) {
    const ModeColumn& c1 = basis.columns[1];
    if (c1.kind == ModeColumn::difference) {
      const double s = basis.params.kappa / std::abs(basis.params.u);
      d.beta = s * d.coefficients[1];
      d.alpha -= d.beta;
    } else {
      d.beta = d.coefficients[1];
    }
  }
  for (const auto& col : basis.columns) d.labels.push_back(col.label());
  const Vec mismatch = c.row_weight.asDiagonal() * (c.e_in * d.coefficients - in);
  d.reconstruction_error = mismatch.norm() / std::max(1e-300, (c.row_weight.asDiagonal() * in).norm());
  if (in.isZero(0.0)) d.reconstruction_error = 0.0;
  d.condition = c.condition;
  return d;
}

Vec reconstruct(const Decomposition& d, const VfpBasis& basis, double x, const VelocityGrid& grid) {
  Vec out = Vec::Zero(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j)
    for (std::size_t k = 0; k < basis.columns.size(); ++k)
      out[j] += d.coefficients[k] * basis.columns[k](x, grid.v[j], basis.params);
  return out;
}

ScatteringMatrix scattering_matrix(const VfpParams& p, double length, const VelocityGrid& grid,
                                   DegenerateMode degenerate) {
  const VfpBasis b(p, length, degenerate);
  const Collocation c = collocate(b, grid);
  ScatteringMatrix s;
  s.map = c.e_out * c.pinv;
  s.condition = c.condition;
  s.min_entry = s.map.minCoeff();
  s.nonnegative = s.min_entry >= -1e-10;
  return s;
}

Mat trace_increment(const VfpParams& p, double length, const VelocityGrid& grid, DegenerateMode degenerate) {
  const VfpBasis b(p, length, degenerate);
  const Collocation c = collocate(b, grid);
  return (c.e_out - c.e_in) * c.pinv;
}

Vec KineticDensity::density() const { return f * grid.weights; }
Vec KineticDensity::momentum() const { return f * grid.weights.cwiseProduct(grid.v); }

double CoupledState::total_momentum() const { return dx * (u.sum() + f.momentum().sum()); }

Vec maxwellian(const VelocityGrid& grid, double rho, double u) {
  const double k = grid.kappa;
  return (rho / std::sqrt(2.0 * M_PI * k)) * (-(grid.v.array() - u).square() / (2.0 * k)).exp().matrix();
}

double coupled_max_dt(const CoupledState& s, double cfl) {
  const double m = std::max(s.u.cwiseAbs().maxCoeff(), 2.0 * s.f.grid.v.cwiseAbs().maxCoeff());
  return cfl * s.dx / m;
}

std::pair<double, Vec> collide_cell(double u, const Vec& f, const VelocityGrid& g, double dt) {
  // w_j df_j/dt = F_{j+1/2} - F_{j-1/2}, F = kappa sqrt(M_j M_{j+1}) (f_{j+1}/M_{j+1} - f_j/M_j) / dv
  // with M the Maxwellian at drift u; backward Euler. The matrix is an
  // M-matrix, the shifted Maxwellian is an exact discrete equilibrium and
  // sum w_j f_j is conserved.
  const Eigen::Index n = g.size();
  const double k = g.kappa;
  Vec lo = Vec::Zero(n), di = g.weights, up = Vec::Zero(n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double dv = g.v[j + 1] - g.v[j];
    const double half = (g.v[j] - u) * (g.v[j] - u) - (g.v[j + 1] - u) * (g.v[j + 1] - u);  // ln(M_j / M_{j+1}) * 2 kappa
    const double c = dt * k / dv;
    const double a_next = c * std::exp(-half / (4.0 * k));  // sqrt(M_j / M_{j+1})
    const double a_this = c * std::exp(half / (4.0 * k));   // sqrt(M_{j+1} / M_j)
    di[j] += a_this;
    up[j] -= a_next;
    di[j + 1] += a_next;
    lo[j + 1] -= a_this;
  }
  Vec rhs = g.weights.cwiseProduct(f), out(n);
  for (Eigen::Index j = 1; j < n; ++j) {  // Thomas
    const double m = lo[j] / di[j - 1];
    di[j] -= m * up[j - 1];
    rhs[j] -= m * rhs[j - 1];
  }
  out[n - 1] = rhs[n - 1] / di[n - 1];
  for (Eigen::Index j = n - 2; j >= 0; --j) out[j] = (rhs[j] - up[j] * out[j + 1]) / di[j];
  const Vec wv = g.weights.cwiseProduct(g.v);
  return {u + f.dot(wv) - out.dot(wv), out};
}

CoupledState burgers_vfp_step(const CoupledState& s, double dt, const CoupledOptions& opt) {
  if (!(dt > 0)) throw StepRejected("burgers_vfp_step: dt must be positive");
  const Eigen::Index nc = s.u.size(), nv = s.f.grid.size();
  if (s.f.f.rows() != nc || s.f.f.cols() != nv) throw InvalidInput("burgers_vfp_step: shape mismatch");
  if (!(s.dx > 0)) throw InvalidInput("burgers_vfp_step: dx must be positive");
  const double bound = coupled_max_dt(s, 1.0);
  if (dt > bound * (1 + 1e-12))
    throw StepRejected("burgers_vfp_step: dt " + std::to_string(dt) + " above CFL bound " + std::to_string(bound));
  const VelocityGrid& g = s.f.grid;
  const double lam = dt / s.dx;
  CoupledState o = s;

  // (i) Burgers, periodic Godunov
  static const ScalarLaw burgers = ScalarLaw::burgers();
  Vec F(nc);
  for (Eigen::Index i = 0; i < nc; ++i) F[i] = godunov_flux(s.u[i], s.u[(i + 1) % nc], burgers);
  for (Eigen::Index i = 0; i < nc; ++i) o.u[i] -= lam * (F[i] - F[(i + nc - 1) % nc]);

  // (ii) kinetic transport. Edge traces come from the cell's stationary
  // solution at the frozen drift, limited to [0, 2 f_i] and to the range of
  // the downstream neighbour so the update stays positive for lam |v| <= 1/2.
  const auto np = static_cast<Eigen::Index>(g.positive.size());
  Mat inc = Mat::Zero(nc, nv);  // raw trace increments, grid order
  if (opt.reconstruct) {
    const unsigned nt = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < nt; ++t)
      jobs.push_back(std::async(std::launch::async, [&, t] {
        for (Eigen::Index i = t; i < nc; i += nt) {
          Vec in(nv);
          for (Eigen::Index r = 0; r < np; ++r) in[r] = s.f.f(i, g.positive[r]);
          for (Eigen::Index r = 0; r < nv - np; ++r) in[np + r] = s.f.f(i, g.negative[r]);
          const Vec d = trace_increment({o.u[i], g.kappa, opt.n_modes}, s.dx, g, opt.degenerate) * in;
          for (Eigen::Index r = 0; r < np; ++r) inc(i, g.positive[r]) = d[r];
          for (Eigen::Index r = 0; r < nv - np; ++r) inc(i, g.negative[r]) = d[np + r];
        }
      }));
    for (auto& j : jobs) j.get();
  }
  auto limited = [&](Eigen::Index i, Eigen::Index nb, Eigen::Index j) {
    const double fi = s.f.f(i, j), fn = s.f.f(nb, j);
    const double lo = std::max(0.0, std::min(fi, fn)), hi = std::min(2.0 * fi, std::max(fi, fn));
    return std::clamp(fi + inc(i, j), std::min(lo, fi), std::max(hi, fi));
  };
  Mat trace(nc, nv);  // right trace for v > 0, left trace for v < 0
  for (Eigen::Index i = 0; i < nc; ++i)
    for (Eigen::Index j = 0; j < nv; ++j) trace(i, j) = limited(i, g.v[j] > 0 ? (i + 1) % nc : (i + nc - 1) % nc, j);
  for (Eigen::Index i = 0; i < nc; ++i) {
    const Eigen::Index im = (i + nc - 1) % nc, ip = (i + 1) % nc;
    for (Eigen::Index j = 0; j < nv; ++j)
      o.f.f(i, j) -= lam * g.v[j] * (g.v[j] > 0 ? trace(i, j) - trace(im, j) : trace(ip, j) - trace(i, j));
  }

  // (iii) drag and collision
  for (Eigen::Index i = 0; i < nc; ++i) {
    auto [un, fn] = collide_cell(o.u[i], o.f.f.row(i).transpose(), g, dt);
    o.u[i] = un;
    o.f.f.row(i) = fn.transpose();
  }

  const double fmax = o.f.f.maxCoeff();
  Eigen::Index ri, ci;
  const double fmin = o.f.f.minCoeff(&ri, &ci);
  if (fmin < -opt.positivity_tol * std::max(fmax, 1e-300))
    throw PositivityError("burgers_vfp_step: f = " + std::to_string(fmin) + " in cell " + std::to_string(ri), ri);
  require_finite(o.u, "burgers_vfp_step velocity");
  o.time += dt;
  return o;
}

}  // namespace hyplab
