#pragma once

#include "hyplab/spectral.hpp"

namespace hyplab {

struct GaussRule {
  Vec nodes;
  Vec weights;
  /// weights * exp(nodes^2) for Hermite rules (stable for large nodes); equal
  /// to `weights` for Legendre.
  Vec scaled_weights;
};

/// Nodes and weights on [-1, 1].
GaussRule gauss_legendre(int n);
/// Physicists' Gauss-Hermite rule for the weight exp(-x^2).
GaussRule gauss_hermite(int n);

template <class F>
double integrate_gl(F&& f, double a, double b, const GaussRule& rule) {
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(m + h * rule.nodes[i]);
  return s * h;
}

}  // namespace hyplab
