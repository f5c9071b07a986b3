#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "hyplab/errors.hpp"

namespace hyplab {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

/// Uniform periodic grid on [0, length) with endpoint excluded.
class PeriodicGrid {
 public:
  PeriodicGrid(int n_points, double length, double origin = 0.0);

  int size() const { return n_; }
  double length() const { return length_; }
  double origin() const { return origin_; }
  double spacing() const { return length_ / n_; }
  const Vec& nodes() const { return nodes_; }
  /// Standard FFT ordering: 0, 1, .., n/2 - 1, -n/2, .., -1 (times 2 pi / length).
  const Vec& wavenumbers() const { return k_; }

  bool operator==(const PeriodicGrid& o) const {
    return n_ == o.n_ && length_ == o.length_ && origin_ == o.origin_;
  }
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }

 private:
  int n_;
  double length_;
  double origin_;
  Vec nodes_;
  Vec k_;
};

/// Samples of a real periodic function on a grid.
struct RealField {
  PeriodicGrid grid;
  Vec samples;

  RealField(const PeriodicGrid& g, Vec s);
  explicit RealField(const PeriodicGrid& g) : RealField(g, Vec::Zero(g.size())) {}

  template <class F>
  static RealField from_function(const PeriodicGrid& g, F&& f) {
    Vec s(g.size());
    for (int j = 0; j < g.size(); ++j) s[j] = f(g.nodes()[j]);
    return RealField(g, std::move(s));
  }

  double mean() const { return samples.mean(); }
};

/// Fourier multiplier k -> s(k) with an explicit value at k = 0.
struct DiagonalSymbol {
  std::function<cplx(double)> evaluator;
  cplx zero_mode = 0.0;
  bool requires_mean_free = false;
  std::string name = "symbol";

  /// Multipliers on the grid in FFT ordering. The Nyquist entry keeps only the
  /// real part of s(k_N) so that real fields map to real fields.
  CVec multipliers(const PeriodicGrid& grid) const;
};

/// i coth(k h0), zero mode 0; inputs must be mean-free.
DiagonalSymbol hilbert_symbol(double h0);
/// i tanh(k h0).
DiagonalSymbol strip_symbol(double h0);
/// k coth(k h0) with zero-mode value 1/h0 (its limit). Pass zero_mode_free to
/// get the mean-annihilating variant.
DiagonalSymbol dtn_symbol(double h0, bool zero_mode_free = false);
/// (i k)^order.
DiagonalSymbol derivative_symbol(int order);

// Raw transforms: forward unnormalized, inverse scaled by 1/n.
CVec fft_forward(const Vec& x);
Vec fft_inverse(const CVec& xh);

/// Apply precomputed multipliers to samples (no precondition checks).
Vec apply_multipliers(const Vec& f, const CVec& m);

RealField spectral_derivative(const RealField& f, int order = 1);
RealField apply_symbol(const RealField& f, const DiagonalSymbol& s);
RealField dealiased_product(const RealField& f, const RealField& g);
/// 3/2-rule product on raw samples of equal length (even n).
Vec dealiased_product(const Vec& f, const Vec& g);

/// Trigonometric interpolant evaluated at an arbitrary point, with its first
/// two derivatives (used for crest location).
struct TrigValue {
  double value, d1, d2;
};
TrigValue trig_interpolate(const CVec& fhat, const PeriodicGrid& grid, double x);

void require_finite(const Vec& v, const char* what);

inline constexpr int kHermiteMaxDefault = 64;

/// Physicists' Hermite polynomial by three-term recurrence.
template <typename Scalar>
Scalar hermite_poly(int n, Scalar x, int max_n = kHermiteMaxDefault) {
  if (n < 0) throw InvalidInput("hermite_poly: negative degree");
  if (n > max_n)
    throw CapabilityError("hermite_poly: degree " + std::to_string(n) + " above maximum " +
                          std::to_string(max_n));
  Scalar h0 = Scalar(1);
  if (n == 0) return h0;
  Scalar h1 = Scalar(2) * x;
  for (int k = 1; k < n; ++k) {
    Scalar h2 = Scalar(2) * x * h1 - Scalar(2 * k) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace hyplab
