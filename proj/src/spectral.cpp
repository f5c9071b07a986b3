#include "hyplab/spectral.hpp"

#include <unsupported/Eigen/FFT>

namespace hyplab {

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace

PeriodicGrid::PeriodicGrid(int n_points, double length, double origin)
    : n_(n_points), length_(length), origin_(origin) {
  if (n_points < 2) throw InvalidInput("PeriodicGrid: need at least 2 points");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidInput("PeriodicGrid: length must be > 0");
  nodes_.resize(n_);
  k_.resize(n_);
  const double dx = length_ / n_;
  const double dk = 2.0 * M_PI / length_;
  for (int j = 0; j < n_; ++j) {
    nodes_[j] = origin_ + j * dx;
    const int m = (j < (n_ + 1) / 2) ? j : j - n_;
    k_[j] = dk * m;
  }
}

RealField::RealField(const PeriodicGrid& g, Vec s) : grid(g), samples(std::move(s)) {
  if (samples.size() != g.size()) throw InvalidInput("RealField: sample count differs from grid size");
}

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite samples");
}

CVec DiagonalSymbol::multipliers(const PeriodicGrid& grid) const {
  const int n = grid.size();
  CVec m(n);
  const Vec& k = grid.wavenumbers();
  for (int j = 0; j < n; ++j) {
    if (j == 0) {
      m[j] = zero_mode;
      continue;
    }
    cplx s = evaluator(k[j]);
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw InvalidInput(name + ": multiplier not finite at k = " + std::to_string(k[j]));
    if (n % 2 == 0 && j == n / 2) s = cplx(0.5 * (s.real() + evaluator(-k[j]).real()), 0.0);
    m[j] = s;
  }
  return m;
}

DiagonalSymbol hilbert_symbol(double h0) {
  if (!(h0 > 0.0)) throw InvalidInput("hilbert_symbol: h0 must be > 0");
  return {[h0](double k) { return cplx(0.0, 1.0 / std::tanh(k * h0)); }, 0.0, true, "H"};
}

DiagonalSymbol strip_symbol(double h0) {
  if (!(h0 > 0.0)) throw InvalidInput("strip_symbol: h0 must be > 0");
  return {[h0](double k) { return cplx(0.0, std::tanh(k * h0)); }, 0.0, false, "S"};
}

DiagonalSymbol dtn_symbol(double h0, bool zero_mode_free) {
  if (!(h0 > 0.0)) throw InvalidInput("dtn_symbol: h0 must be > 0");
  return {[h0](double k) { return cplx(k / std::tanh(k * h0), 0.0); },
          zero_mode_free ? cplx(0.0) : cplx(1.0 / h0), false, "C"};
}

DiagonalSymbol derivative_symbol(int order) {
  if (order < 1) throw InvalidInput("derivative_symbol: order must be >= 1");
  return {[order](double k) { return std::pow(cplx(0.0, k), order); }, 0.0, false, "d/dx"};
}

CVec fft_forward(const Vec& x) {
  CVec out;
  fft_engine().fwd(out, x);
  return out;
}

Vec fft_inverse(const CVec& xh) {
  Vec out;
  fft_engine().inv(out, xh);
  return out;
}

Vec apply_multipliers(const Vec& f, const CVec& m) {
  CVec fh = fft_forward(f);
  fh.array() *= m.array();
  return fft_inverse(fh);
}

RealField spectral_derivative(const RealField& f, int order) {
  if (order < 1) throw InvalidInput("spectral_derivative: order must be >= 1");
  require_finite(f.samples, "spectral_derivative");
  return RealField(f.grid, apply_multipliers(f.samples, derivative_symbol(order).multipliers(f.grid)));
}

RealField apply_symbol(const RealField& f, const DiagonalSymbol& s) {
  require_finite(f.samples, "apply_symbol");
  if (s.requires_mean_free) {
    const double scale = std::max(1.0, f.samples.cwiseAbs().maxCoeff());
    if (std::abs(f.mean()) > 1e-12 * scale)
      throw PreconditionError(s.name + " requires a mean-free input (mean = " + std::to_string(f.mean()) + ")");
  }
  return RealField(f.grid, apply_multipliers(f.samples, s.multipliers(f.grid)));
}

Vec dealiased_product(const Vec& f, const Vec& g) {
  const Eigen::Index n = f.size();
  if (g.size() != n) throw InvalidInput("dealiased_product: size mismatch");
  if (n % 2 != 0) throw InvalidInput("dealiased_product: even number of points required");
  const Eigen::Index M = 3 * n / 2;
  const Eigen::Index h = n / 2;
  const CVec fh = fft_forward(f);
  const CVec gh = fft_forward(g);
  const double up = double(M) / double(n);

  auto pad = [&](const CVec& a) {
    CVec p = CVec::Zero(M);
    for (Eigen::Index j = 0; j < h; ++j) p[j] = a[j] * up;
    for (Eigen::Index j = 1; j < h; ++j) p[M - j] = a[n - j] * up;
    p[h] = 0.5 * a[h] * up;
    p[M - h] = 0.5 * a[h] * up;
    return p;
  };
  const Vec fp = fft_inverse(pad(fh));
  const Vec gp = fft_inverse(pad(gh));
  const CVec ph = fft_forward(Vec(fp.cwiseProduct(gp)));

  const double down = double(n) / double(M);
  CVec out(n);
  for (Eigen::Index j = 0; j < h; ++j) out[j] = ph[j] * down;
  for (Eigen::Index j = 1; j < h; ++j) out[n - j] = ph[M - j] * down;
  // Nyquist: fold +-n/2, then drop the alias of the k = +-n pair that the
  // padded grid maps back onto it.
  out[h] = (ph[h] + ph[M - h]) * down - 0.5 * fh[h] * gh[h] / double(n);
  out[h] = cplx(out[h].real(), 0.0);
  return fft_inverse(out);
}

RealField dealiased_product(const RealField& f, const RealField& g) {
  if (f.grid != g.grid) throw InvalidInput("dealiased_product: grid mismatch");
  return RealField(f.grid, dealiased_product(f.samples, g.samples));
}

TrigValue trig_interpolate(const CVec& fhat, const PeriodicGrid& grid, double x) {
  const int n = grid.size();
  const Vec& k = grid.wavenumbers();
  TrigValue r{0.0, 0.0, 0.0};
  const double xs = x - grid.origin();
  for (int j = 0; j < n; ++j) {
    const double kk = k[j];
    if (n % 2 == 0 && j == n / 2) {
      // cos(k_N x) only
      const double c = std::cos(kk * xs);
      const double s = std::sin(kk * xs);
      const double a = fhat[j].real() / n;
      r.value += a * c;
      r.d1 += -a * kk * s;
      r.d2 += -a * kk * kk * c;
      continue;
    }
    const cplx e = std::polar(1.0, kk * xs) * fhat[j] / double(n);
    r.value += e.real();
    r.d1 += (cplx(0.0, kk) * e).real();
    r.d2 += (-kk * kk * e).real();
  }
  return r;
}

}  // namespace hyplab
