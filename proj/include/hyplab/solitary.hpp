#pragma once

#include <string>

#include "hyplab/spectral.hpp"

namespace hyplab {

enum class WaveModel { full_euler, sgn, esgn };

inline const char* to_string(WaveModel m) {
  switch (m) {
    case WaveModel::full_euler: return "full-euler";
    case WaveModel::sgn: return "sgn";
    case WaveModel::esgn: return "esgn";
  }
  return "?";
}

/// Steady solitary wave on a periodic window centred on its crest.
struct SolitaryWave {
  double amplitude_ratio = 0.0;  // a / d
  double speed_ratio = 0.0;      // c / sqrt(g d)
  double d = 1.0;
  double g = 1.0;
  double speed = 0.0;
  RealField profile;  // surface elevation above still water
  Vec abscissa;       // physical x of each sample (differs from the grid for conformal profiles)
  WaveModel source_model = WaveModel::sgn;
  int iterations = 0;
  double residual = 0.0;

  explicit SolitaryWave(const PeriodicGrid& grid) : profile(grid) {}
};

}  // namespace hyplab
