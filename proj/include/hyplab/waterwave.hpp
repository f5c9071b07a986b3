#pragma once

#include <functional>
#include <vector>

#include "hyplab/solitary.hpp"
#include "hyplab/spectral.hpp"

namespace hyplab {

/// Surface traces on the periodic conformal strip of depth h0. chi0 is the
/// mean horizontal drift of the map, x(xi) = xi + X(xi) + chi0 with X = -H[gamma].
struct ConformalSurfaceState {
  RealField gamma;
  RealField phi_s;
  double h0 = 1.0;
  double g = 1.0;
  double chi0 = 0.0;
  double time = 0.0;

  ConformalSurfaceState(const PeriodicGrid& grid, double h0_, double g_)
      : gamma(grid), phi_s(grid), h0(h0_), g(g_) {}
  ConformalSurfaceState(RealField gamma_, RealField phi_, double h0_, double g_);
};

struct ConformalRhs {
  Vec gamma_t;
  Vec phi_t;
  double chi0_t = 0.0;
  double min_jacobian = 0.0;
  double max_speed = 0.0;  // max |velocity| at the surface
};

inline constexpr double kJacobianMin = 1e-6;

ConformalRhs conformal_rhs(const ConformalSurfaceState& s, double j_min = kJacobianMin);

struct ConservedQuantities {
  double mass = 0.0;    // int gamma chi_xi
  double energy = 0.0;  // 1/2 int phi psi_xi + g/2 int gamma^2 chi_xi
};
ConservedQuantities conserved(const ConformalSurfaceState& s);

struct CrestInfo {
  double xi = 0.0;         // crest in the conformal coordinate
  double x = 0.0;          // physical crest position (includes chi0)
  double elevation = 0.0;  // gamma at the crest
  double far_elevation = 0.0;
  double far_velocity = 0.0;  // horizontal surface velocity opposite the crest
};
CrestInfo locate_crest(const ConformalSurfaceState& s);

/// Relative magnitude of the upper quarter of the retained band.
double spectral_tail(const Vec& f);

struct EvolveOptions {
  double courant = 0.1;   // dt <= courant * dxi / max(|u| + sqrt(g h0))
  double dt_fixed = 0.0;  // > 0 overrides the adaptive bound
  std::vector<double> snapshot_times;
  int diagnostics_every = 10;
  double j_min = kJacobianMin;
  double initial_tail = 1e-10;
  double tail_growth = 1e-4;
};

struct Trajectory {
  std::vector<ConformalSurfaceState> snapshots;
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> energy;
  long steps = 0;
  ConformalSurfaceState final_state;

  explicit Trajectory(const ConformalSurfaceState& s) : final_state(s) {}
  double mass_drift() const;
  double energy_drift() const;
};

/// Classical RK4 from s.time to t_end, landing exactly on snapshot times.
Trajectory evolve(const ConformalSurfaceState& s, double t_end, const EvolveOptions& opt = {});

struct PetviashviliResult {
  RealField u;
  int iterations = 0;
  double stabilizer = 0.0;
  double update = 0.0;
  std::vector<double> trace;  // stabilizing factor per iteration
};

struct PetviashviliOptions {
  double tol = 1e-14;
  int max_iterations = 10000;
};

/// Fixed point of L u = N(u) via u <- S^gamma_exp L^-1 N(u), S = <Lu,u>/<N(u),u>.
/// A zero value of the symbol at k = 0 projects the mean out of every iterate.
PetviashviliResult petviashvili_solve(const DiagonalSymbol& L, const std::function<Vec(const Vec&)>& N,
                                      const RealField& guess, double gamma_exp = 2.0,
                                      const PetviashviliOptions& opt = {});

struct BabenkoOptions {
  double window = 0.0;  // 0: from the tail decay rate
  int n_points = 4096;
  double g = 1.0;
  double h0 = 1.0;           // conformal depth of the mean-free gauge
  double window_tail = 1e-12;
  double amplitude_tol = 1e-12;
};

/// Periodic-gauge Babenko solution in conformal variables. profile holds
/// gamma - gamma_inf (elevation above still water) against xi; abscissa holds
/// the physical x. Physical depth d = h0 + gamma_inf.
struct BabenkoWave {
  SolitaryWave wave;
  RealField gamma;      // mean-free conformal trace
  double ctilde2 = 0.0;  // eigenvalue of the periodic-gauge equation
  double gamma_inf = 0.0;
  double q = 0.0;  // phi_xi = q C[gamma]
};

BabenkoWave babenko_wave(double amplitude_ratio, const BabenkoOptions& opt = {});
SolitaryWave babenko_solitary(double amplitude_ratio, double window = 0.0, int n_points = 4096);

/// Initial conformal state (gamma, phi) carrying the steady wave.
ConformalSurfaceState babenko_initial_state(const BabenkoWave& w, double g = 1.0);

}  // namespace hyplab
