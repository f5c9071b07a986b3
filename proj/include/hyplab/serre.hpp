#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyplab/solitary.hpp"
#include "hyplab/spectral.hpp"

namespace hyplab {

/// Depth field h > 0 and depth-averaged velocity on a periodic grid.
struct ShallowState {
  RealField h;
  RealField u_bar;
  double d = 1.0;
  double g = 1.0;
  double alpha = 1.0;

  void validate() const;
};

struct DispersionCurve {
  Vec kd_samples;
  Vec c2_over_gd;
};

/// 2 h u_x^2 - h d/dx [u_t + u u_x], spectral derivatives and 3/2-rule products.
RealField vertical_acceleration(const RealField& h, const RealField& u_bar, const RealField& u_bar_t);

/// Closure of the alpha-family: 2 h u_x^2 + (1 - alpha) g h h_xx - alpha h d/dx [u_t + u u_x].
RealField vertical_acceleration_alpha(const RealField& h, const RealField& u_bar, const RealField& u_bar_t,
                                      double g, double alpha);

double esgn_dispersion(double kd, double alpha);
/// tanh(kd)/kd with the removable singularity filled in.
double exact_dispersion(double kd);
/// esgn_dispersion - exact_dispersion without cancellation at small kd.
double dispersion_error(double kd, double alpha);
DispersionCurve esgn_dispersion_curve(const Vec& kd, double alpha);

/// Decay rate of the linearised far field: h - d ~ exp(-kappa |xi|).
double tail_decay_rate(double c, double d, double g, double alpha);

struct ProfileOptions {
  int n_points = 1024;
  double window = 0.0;  // 0: chosen from the tail decay rate
};

SolitaryWave sgn_solitary(double amplitude_ratio, double d = 1.0, double g = 1.0, const ProfileOptions& opt = {});
SolitaryWave esgn_solitary(double amplitude_ratio, double alpha, double d = 1.0, double g = 1.0,
                           const ProfileOptions& opt = {});

/// Speed-condition integral whose root in c is the eSGN solitary speed.
double esgn_speed_residual(double c, double amplitude, double alpha, double d, double g);

struct TravelingResidual {
  double mass = 0.0;
  double momentum = 0.0;
  double max() const { return std::max(mass, momentum); }
};

/// Max-norm residual of the mass and momentum equations of the alpha-model for
/// a profile moving rigidly at speed c (time derivatives replaced by -c d/dx).
TravelingResidual traveling_residual(const RealField& h, const RealField& u_bar, double c, double g, double alpha);

struct SweepRow {
  double amplitude_ratio = 0.0;
  double speed_ratio = 0.0;
  bool ok = false;
  std::string message;
};

/// model: "sgn", "esgn" or "euler". Failures are flagged per row.
std::vector<SweepRow> speed_amplitude_sweep(const std::string& model, const std::vector<double>& amplitudes,
                                            double alpha = 1.2);

}  // namespace hyplab
