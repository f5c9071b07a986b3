#pragma once

#include <functional>
#include <vector>

#include "hyplab/spectral.hpp"

namespace hyplab {

/// u_t + f(u)_x = k(x) g(u) with k >= 0.
struct ScalarLaw {
  std::function<double(double)> flux;
  std::function<double(double)> flux_derivative;
  std::function<double(double)> source = [](double) { return 0.0; };
  std::function<double(double)> source_coefficient = [](double) { return 0.0; };
  double eps_sonic = 1e-8;
  int convexity = 1;  // +1 convex, -1 concave; set by check_convexity

  /// Samples f'' by central differences on [lo, hi]; throws if it changes sign.
  void check_convexity(double lo, double hi, int samples = 201);
  static ScalarLaw burgers();
};

/// Cell averages u and the piecewise-constant primitive a of k.
struct TempleState {
  Vec x;  // cell centres
  Vec u;
  Vec a;
  double dx = 0.0;
  double time = 0.0;
};

/// Uniform cells on [x_left, x_right]; a_j integrates k from the first centre.
TempleState make_temple_state(double x_left, double x_right, int n_cells, const std::function<double(double)>& u0,
                              const ScalarLaw& law);

/// d f(u)/da = g(u) integrated over [0, delta_a] (adaptive Dormand-Prince).
double steady_jump(double u_in, double delta_a, const ScalarLaw& law, double tol = 1e-10);

/// State at x/t = 0 of the exact Riemann solution (convex or concave flux).
double riemann_state(double uL, double uR, const ScalarLaw& law);
double godunov_flux(double uL, double uR, const ScalarLaw& law);

struct InterfaceFlux {
  double minus;  // leaves the left cell
  double plus;   // enters the right cell
};
InterfaceFlux wb_interface_flux(double uL, double uR, double delta_a, const ScalarLaw& law);

struct StepOptions {
  double cfl = 0.9;
};

TempleState wb_godunov_step(const TempleState& s, const ScalarLaw& law, double dt, const StepOptions& opt = {});
/// Largest dt allowed by the CFL bound.
double max_stable_dt(const TempleState& s, const ScalarLaw& law, double cfl = 0.9);
TempleState run_to(TempleState s, const ScalarLaw& law, double t_end, const StepOptions& opt = {});

/// Chain steady_jump from u_first at the first cell.
TempleState chained_steady_state(double x_left, double x_right, int n_cells, double u_first, const ScalarLaw& law);

// Traffic flux f(a, u) = 8 a u - u^2 on lanes a(x).
double traffic_flux(double a, double u);
double traffic_eigenvalue(double a, double u);  // 8a - 2u; the other eigenvalue is 0
double traffic_junction_flux(double aL, double uL, double aR, double uR);

struct BressanOptions {
  int n_cells = 400;
  double x_left = -1.0, x_right = 1.0;
  double t_end = 0.5;
  double cfl = 0.9;
  double delta = 1e-6;
  int snapshots = 5;
};

struct BressanReport {
  Vec x, a;
  Vec u_base, u_perturbed;
  std::vector<double> snapshot_times;
  std::vector<Vec> eigenvalues;  // 8a - 2u of the base run at each snapshot
  double min_abs_eigenvalue = 0.0;
  double initial_distance = 0.0;  // max norm
  double final_distance = 0.0;
  double sensitivity = 0.0;  // final / initial, max norm
  double l1_sensitivity = 0.0;
  long steps = 0;
};

/// Two runs, u0 and u0 - delta on the left of the lane jump; lanes a_left for
/// x < 0, a_right for x > 0.
BressanReport bressan_demo(double a_left, double a_right, const std::function<double(double)>& u0,
                           const BressanOptions& opt = {});

/// Left state whose free-flow flux equals the capacity 16 a_right^2 of the right road.
double bressan_resonant_left_state(double a_left, double a_right);

}  // namespace hyplab
