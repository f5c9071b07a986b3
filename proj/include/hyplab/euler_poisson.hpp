#pragma once

#include <limits>
#include <vector>

#include "hyplab/spectral.hpp"

namespace hyplab {

using Pair = Eigen::Vector2d;

/// Density and momentum per cell; Riemann invariants u +- rho/2 on demand.
struct MomentState {
  Vec rho;
  Vec momentum;

  Eigen::Index size() const { return rho.size(); }
  Vec velocity() const;
  Vec u_plus() const;
  Vec u_minus() const;
  static MomentState from_invariants(const Vec& up, const Vec& um);
};

struct DeviceConfig {
  int n_cells = 64;
  Vec doping;  // rho_D at cell centres, in (0, 1]
  Vec debye;   // lambda > 0
  Vec tau;     // damping time, +inf for none
  double doping_left = 1.0, doping_right = 1.0;  // rho_D at x = -1, 1
  double bias = 0.0;                             // phi(1) = -bias
  double cfl = 0.5;
  bool literal_damping = false;  // drop the dx factor of the augmented jump

  double dx() const { return 2.0 / n_cells; }
  Vec centres() const;
  void validate() const;

  /// Default n+ n n+ profile: 1 for |x| >= 0.4, 0.2 for |x| <= 0.3, linear in between.
  static double default_doping(double x);
  static DeviceConfig standard(int n_cells, double lambda, double bias,
                               double tau = std::numeric_limits<double>::infinity());
};

/// Cell-centred potential with the two boundary values.
struct PotentialField {
  Vec phi;
  double phi_left = 0.0, phi_right = 0.0;
  Vec e_field;  // -dphi/dx at the n + 1 interfaces
  double residual = 0.0;
};

/// ((up^2 - um^2)/2, (up^3 - um^3)/3).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> euler_flux_t(Scalar up, Scalar um) {
  return {(up * up - um * um) / Scalar(2), (up * up * up - um * um * um) / Scalar(3)};
}
Pair euler_flux(double up, double um);

struct SplitFlux {
  Pair plus, minus;
};
SplitFlux split_flux(double up, double um);

struct WbFlux {
  Pair plus;   // F+ at the interface, enters the right cell
  Pair minus;  // F- at the interface, enters the left cell
};
/// Well-balanced kinetic interface flux with transmission and reflection terms;
/// delta_phi = phi_right - phi_left.
WbFlux wb_interface_flux(double up_l, double um_l, double up_r, double um_r, double delta_phi);

double augmented_jump(double delta_phi, double u_left, double u_right, double tau, double dx, bool literal = false);

PotentialField poisson_solve(const Vec& rho, const DeviceConfig& config);

/// Kinetic transport over dt with a given potential (no Poisson update).
MomentState transport_step(const MomentState& s, const PotentialField& phi, const DeviceConfig& config, double dt);
/// Transport followed by the Poisson re-solve; the potential is updated in place.
MomentState device_step(const MomentState& s, PotentialField& phi, const DeviceConfig& config, double dt);
double max_stable_dt(const MomentState& s, const DeviceConfig& config);

/// Net mass flux out of the domain over one step (boundary fluxes times dt / dx
/// are what the cell sums see).
struct BoundaryFlux {
  double left = 0.0, right = 0.0;  // mass flux through x = -1 and x = 1, positive to the right
};
BoundaryFlux boundary_mass_flux(const MomentState& s, const PotentialField& phi, const DeviceConfig& config);

struct SteadyOptions {
  long max_steps = 400000;
  double tol = 1e-8;
  int consecutive = 50;
};

struct DeviceRun {
  MomentState state;
  PotentialField potential;
  bool converged = false;
  long steps = 0;
  double time = 0.0;
  double residual = 0.0;
};

DeviceRun run_to_steady(const MomentState& initial, const DeviceConfig& config, const SteadyOptions& opt = {});
MomentState rest_state(const DeviceConfig& config);

/// Sign changes of |u| - rho/2 between neighbouring cells.
int count_sonic_points(const MomentState& s);
/// Supersonic-to-subsonic transitions along the flow direction.
int count_sonic_shocks(const MomentState& s);
Vec mach_number(const MomentState& s);

struct IvRow {
  double bias = 0.0;
  double current = 0.0;      // median of rho u
  double oscillation = 0.0;  // max - min of rho u
  int sonic_points = 0;
  int sonic_shocks = 0;
  bool converged = false;
  long steps = 0;
  std::string message;
};

/// One steady run per bias, in parallel; non-converged rows are flagged.
std::vector<IvRow> iv_curve(const DeviceConfig& config, const std::vector<double>& biases,
                            const SteadyOptions& opt = {});

}  // namespace hyplab
