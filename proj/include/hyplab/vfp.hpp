#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hyplab/errors.hpp"
#include "hyplab/spectral.hpp"

namespace hyplab {

/// Stationary operator v f_x + u f_v - (v f + kappa f_v)_v with constant drift u.
struct VfpParams {
  double u = 0.0;
  double kappa = 1.0;
  int n_modes = 8;

  void validate() const;
};

/// mu_{+-n} = (-u +- sqrt(u^2 + 4 kappa n)) / (2 kappa). sign is +1 or -1.
double vfp_eigenvalue(int n, int sign, const VfpParams& p);
/// (v - 2 mu kappa - u) / sqrt(2 kappa).
double translated_velocity(int n, int sign, double v, const VfpParams& p);

/// Psi_{+-n}(x, v); n = 0 gives the two diffusion modes. The exponentials are
/// merged so the evaluation stays finite wherever the product is.
template <typename Scalar>
Scalar vfp_mode_t(int n, int sign, Scalar x, Scalar v, const VfpParams& p) {
  using std::exp;
  const double k = p.kappa, u = p.u;
  if (n == 0) {
    const double lin = sign > 0 ? std::min(u, 0.0) : std::max(u, 0.0);
    const Scalar w = sign > 0 ? v - Scalar(std::abs(u)) : v + Scalar(std::abs(u));
    return exp(Scalar(lin / k) * (x + v) - w * w / Scalar(2.0 * k));
  }
  const double mu = vfp_eigenvalue(n, sign, p);
  const Scalar vt = (v - Scalar(2.0 * mu * k + u)) / Scalar(std::sqrt(2.0 * k));
  return exp(Scalar(-mu) * (x + v) - vt * vt) * hermite_poly(n, vt);
}

double vfp_mode(int n, int sign, double x, double v, const VfpParams& p);

/// (x - v) exp(-v^2 / (2 kappa)): the second stationary solution at u = 0.
double vfp_linear_mode(double x, double v, const VfpParams& p);

/// Max over an (x, v) box of |L Psi| / max|Psi| with eighth-order central
/// differences of spacing h.
double mode_residual(int n, int sign, const VfpParams& p, double h, double x_lo = 0.0, double x_hi = 1.0,
                     double v_lo = -4.0, double v_hi = 4.0);

enum class DegenerateMode { drop, linear_response };

struct ModeColumn {
  /// psi: Psi_{sign n}. difference: kappa (Psi_0^- - Psi_0^+) / |u|, which spans
  /// the same pair as Psi_0^+- without their near-collinearity at small u.
  /// linear: its u -> 0 limit (x - v) exp(-v^2 / (2 kappa)).
  enum Kind { psi, difference, linear };
  int n = 0;
  int sign = 1;
  Kind kind = psi;
  double shift = 0.0;  // evaluated at x - shift

  double operator()(double x, double v, const VfpParams& p) const;
  std::string label() const;
};

/// Truncated basis: Psi_0^+, the difference column (u != 0) or its
/// replacement at u = 0, and Psi_{+n}(x, v), Psi_{-n}(x - L, v) for n = 1..N.
struct VfpBasis {
  VfpParams params;
  double length = 1.0;
  Vec mu_plus;   // mu_{+n}, n = 0..N (n = 0 holds mu_0^+)
  Vec mu_minus;  // mu_{-n}, n = 0..N (n = 0 holds mu_0^-)
  std::vector<ModeColumn> columns;
  bool rank_reduced = false;

  VfpBasis(const VfpParams& p, double length, DegenerateMode degenerate = DegenerateMode::drop);
};

/// Discrete ordinates v_j = sqrt(2 kappa) y_j on Gauss-Hermite nodes; weights
/// integrate functions with Maxwellian decay (int g dv ~ sum w_j g(v_j)).
struct VelocityGrid {
  Vec v;
  Vec weights;
  Vec y;                // unscaled nodes
  Vec scaled_weights;   // Gauss-Hermite w e^{y^2}
  double kappa = 1.0;
  std::vector<int> positive, negative;

  static VelocityGrid hermite(int n_nodes, double kappa);
  Eigen::Index size() const { return v.size(); }
};

struct Decomposition {
  Vec coefficients;  // per basis column
  double alpha = 0.0, beta = 0.0;  // on Psi_0^+ and Psi_0^- (beta on the linear mode at u = 0)
  std::vector<std::string> labels;
  double reconstruction_error = 0.0;  // weighted RMS mismatch on the incoming data
  double condition = 0.0;
};

inline constexpr double kCollocationConditionMax = 1e12;

/// Weighted least squares of the basis against the incoming traces: v > 0 at
/// x = 0 and v < 0 at x = L. Values follow grid.positive / grid.negative.
Decomposition half_range_decompose(const Vec& in_left, const Vec& in_right, const VfpBasis& basis,
                                   const VelocityGrid& grid);

/// Evaluates sum_c coeff_c Psi_c(x, v_j) on the grid.
Vec reconstruct(const Decomposition& d, const VfpBasis& basis, double x, const VelocityGrid& grid);

struct ScatteringMatrix {
  Mat map;  // [in_left(v>0); in_right(v<0)] -> [out_right(v>0); out_left(v<0)]
  double condition = 0.0;
  double min_entry = 0.0;
  bool nonnegative = true;  // min_entry >= -1e-10
};

ScatteringMatrix scattering_matrix(const VfpParams& p, double length, const VelocityGrid& grid,
                                   DegenerateMode degenerate = DegenerateMode::drop);

/// (E_out - E_in) pinv(E_in): traces = in + T in. Exact for data in the span and
/// leaves the complement untouched.
Mat trace_increment(const VfpParams& p, double length, const VelocityGrid& grid,
                    DegenerateMode degenerate = DegenerateMode::drop);

/// f(x_i, v_j): rows are cells, columns velocity nodes.
struct KineticDensity {
  Mat f;
  VelocityGrid grid;

  Vec density() const;   // sum_j w_j f_ij
  Vec momentum() const;  // sum_j w_j v_j f_ij
};

struct CoupledState {
  Vec u;  // Burgers velocity per cell
  KineticDensity f;
  double dx = 0.0;  // periodic cells
  double time = 0.0;

  /// sum_i dx (u_i + J_i).
  double total_momentum() const;
};

struct CoupledOptions {
  int n_modes = 8;
  double positivity_tol = 1e-10;  // relative to max f
  bool reconstruct = true;        // stationary traces at cell edges
  DegenerateMode degenerate = DegenerateMode::linear_response;  // continuous as u -> 0
};

/// Largest dt with dt max(|u|, 2 |v|) <= cfl dx; the kinetic half keeps
/// lam |v| <= 1/2 for the limited edge traces.
double coupled_max_dt(const CoupledState& s, double cfl = 0.9);

/// One splitting step: Godunov Burgers, upwind kinetic transport through
/// limited per-cell stationary traces, then backward-Euler Fokker-Planck
/// collision at the frozen drift with the opposite momentum change given to u.
CoupledState burgers_vfp_step(const CoupledState& s, double dt, const CoupledOptions& opt = {});

/// Backward-Euler collision at drift u in one cell; returns (u - dJ, f').
std::pair<double, Vec> collide_cell(double u, const Vec& f, const VelocityGrid& grid, double dt);

/// Maxwellian rho exp(-(v - u)^2 / (2 kappa)) / sqrt(2 pi kappa).
Vec maxwellian(const VelocityGrid& grid, double rho, double u = 0.0);

}  // namespace hyplab
