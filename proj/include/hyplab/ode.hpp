#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hyplab/errors.hpp"

namespace hyplab {

namespace detail {
inline double err_norm(double e, double y0, double y1, double atol, double rtol) {
  return std::abs(e) / (atol + rtol * std::max(std::abs(y0), std::abs(y1)));
}
template <class V>
double err_norm(const V& e, const V& y0, const V& y1, double atol, double rtol) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    m = std::max(m, err_norm(double(e[i]), double(y0[i]), double(y1[i]), atol, rtol));
  return m;
}
}  // namespace detail

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: pick from interval length
  long max_steps = 200000;
};

/// Dormand-Prince 5(4) from t0 to t1. `f(t, y)` returns dy/dt; `guard(t, y)`
/// is called on every accepted state and may throw to abort.
template <class State, class F, class G>
State dopri45(F&& f, State y, double t0, double t1, const OdeOptions& opt, G&& guard) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = opt.h_init > 0 ? dir * opt.h_init : span / 16.0;
  double t = t0;
  guard(t, y);
  State k1 = f(t, y);
  for (long step = 0; step < opt.max_steps; ++step) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    const State k2 = f(t + c2 * h, State(y + h * a21 * k1));
    const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 =
        f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, y5);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::err_norm(err, y, y5, opt.atol, opt.rtol);
    if (!std::isfinite(en)) {
      h *= 0.25;
      if (std::abs(h) < 1e-300) throw ConvergenceError("dopri45: step size underflow");
      continue;
    }
    if (en <= 1.0) {
      t += h;
      y = y5;
      guard(t, y);
      k1 = k7;
      if (dir * (t - t1) >= 0) return y;
    }
    const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= fac;
    if (std::abs(h) < 1e-14 * std::abs(span)) throw ConvergenceError("dopri45: step size collapsed");
  }
  throw ConvergenceError("dopri45: step budget exhausted");
}

template <class State, class F>
State dopri45(F&& f, State y, double t0, double t1, const OdeOptions& opt = {}) {
  return dopri45(std::forward<F>(f), std::move(y), t0, t1, opt, [](double, const State&) {});
}

/// Brent root finding on a bracket [a, b] with f(a) f(b) <= 0.
template <class F>
double brent_root(F&& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0) throw ConvergenceError("brent_root: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (fb * fc > 0) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("brent_root: iteration budget exhausted");
}

/// Adaptive Simpson quadrature with Richardson correction on [a, b].
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-13, int depth = 50) {
  auto simpson = [&](double lo, double flo, double hi, double fhi, double& mid, double& fmid) {
    mid = 0.5 * (lo + hi);
    fmid = f(mid);
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  };
  std::function<double(double, double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double flo, double hi, double fhi, double mid, double fmid, double whole,
          double eps, int lvl) -> double {
    double lm, flm, rm, frm;
    const double left = simpson(lo, flo, mid, fmid, lm, flm);
    const double right = simpson(mid, fmid, hi, fhi, rm, frm);
    const double delta = left + right - whole;
    if (lvl <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return rec(lo, flo, mid, fmid, lm, flm, left, 0.5 * eps, lvl - 1) +
           rec(mid, fmid, hi, fhi, rm, frm, right, 0.5 * eps, lvl - 1);
  };
  const double fa = f(a), fb = f(b);
  double mid, fmid;
  const double whole = simpson(a, fa, b, fb, mid, fmid);
  return rec(a, fa, b, fb, mid, fmid, whole, tol, depth);
}

}  // namespace hyplab
