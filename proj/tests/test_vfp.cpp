#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/scalar_wb.hpp"
#include "hyplab/vfp.hpp"

using namespace hyplab;

namespace {

// Stationary operator applied to vfp_mode by fourth-order central differences.
double fd_residual(int n, int sign, const VfpParams& p, double x, double v, double h = 1e-3) {
  auto f = [&](double xx, double vv) { return vfp_mode(n, sign, xx, vv, p); };
  auto d1 = [&](auto g) { return (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h); };
  const double fx = d1([&](double e) { return f(x + e, v); });
  const double fv = d1([&](double e) { return f(x, v + e); });
  const double fvv = (-f(x, v + 2 * h) + 16 * f(x, v + h) - 30 * f(x, v) + 16 * f(x, v - h) - f(x, v - 2 * h)) /
                     (12 * h * h);
  return v * fx + (p.u - v) * fv - f(x, v) - p.kappa * fvv;
}

struct Traces {
  Vec left, right;
};

Traces traces(const std::function<double(double, double)>& f, double L, const VelocityGrid& g) {
  Traces t{Vec(g.positive.size()), Vec(g.negative.size())};
  for (std::size_t i = 0; i < g.positive.size(); ++i) t.left[i] = f(0.0, g.v[g.positive[i]]);
  for (std::size_t i = 0; i < g.negative.size(); ++i) t.right[i] = f(L, g.v[g.negative[i]]);
  return t;
}

CoupledState coupled(int nc, int nv, const std::function<double(double)>& u, const std::function<double(double)>& rho,
                     const std::function<double(double)>& drift) {
  CoupledState s;
  s.dx = 1.0 / nc;
  s.f.grid = VelocityGrid::hermite(nv, 1.0);
  s.u.resize(nc);
  s.f.f.resize(nc, nv);
  for (int i = 0; i < nc; ++i) {
    const double x = (i + 0.5) * s.dx;
    s.u[i] = u(x);
    s.f.f.row(i) = maxwellian(s.f.grid, rho(x), drift(x)).transpose();
  }
  return s;
}

}  // namespace

TEST_CASE("eigenvalues") {
  VfpParams p{0.0, 1.0};
  CHECK(vfp_eigenvalue(4, 1, p) == 2.0);
  CHECK(vfp_eigenvalue(4, -1, p) == -2.0);
  CHECK(vfp_eigenvalue(0, 1, p) == 0.0);
  CHECK(vfp_eigenvalue(0, -1, p) == 0.0);
  p.u = 3.0;
  CHECK(vfp_eigenvalue(0, 1, p) == 0.0);
  CHECK(vfp_eigenvalue(0, -1, p) == -3.0);
  p.u = -3.0;
  CHECK(vfp_eigenvalue(0, 1, p) == 3.0);
  CHECK(vfp_eigenvalue(0, -1, p) == 0.0);

  // roots of kappa mu^2 + u mu - n = 0
  for (double u : {-1.3, 0.0, 0.4, 2.5})
    for (double k : {0.5, 1.0, 3.0})
      for (int n = 1; n <= 10; ++n) {
        const VfpParams q{u, k};
        const double a = vfp_eigenvalue(n, 1, q), b = vfp_eigenvalue(n, -1, q);
        CHECK(a + b == doctest::Approx(-u / k).epsilon(1e-13));
        CHECK(a * b == doctest::Approx(-n / k).epsilon(1e-13));
        CHECK(k * a * a + u * a - n == doctest::Approx(0.0).scale(n));
      }
  CHECK_THROWS_AS(vfp_eigenvalue(-1, 1, p), InvalidInput);
  CHECK_THROWS_AS(vfp_eigenvalue(1, 0, p), InvalidInput);
}

TEST_CASE("eigenvalue ordering") {
  for (double u : {-0.8, 0.3, 2.0}) {
    const VfpParams p{u, 1.3};
    const double m0 = std::min(vfp_eigenvalue(0, 1, p), vfp_eigenvalue(0, -1, p));
    const double M0 = std::max(vfp_eigenvalue(0, 1, p), vfp_eigenvalue(0, -1, p));
    CHECK(m0 <= 0.0);
    CHECK(M0 >= 0.0);
    CHECK(vfp_eigenvalue(1, -1, p) < m0);
    CHECK(vfp_eigenvalue(1, 1, p) > M0);
    for (int n = 1; n < 10; ++n) {
      CHECK(vfp_eigenvalue(n + 1, 1, p) > vfp_eigenvalue(n, 1, p));
      CHECK(vfp_eigenvalue(n + 1, -1, p) < vfp_eigenvalue(n, -1, p));
    }
  }
}

TEST_CASE("u -> 0 limits") {
  const double k = 0.7;
  const VfpParams p{1e-6, k};
  for (int n = 1; n <= 10; ++n) {
    CHECK(std::abs(vfp_eigenvalue(n, 1, p) - std::sqrt(n / k)) <= 1e-5);
    CHECK(std::abs(vfp_eigenvalue(n, -1, p) + std::sqrt(n / k)) <= 1e-5);
    for (double v : {-2.0, 0.5, 3.0}) {
      CHECK(std::abs(translated_velocity(n, 1, v, p) - (v / std::sqrt(2 * k) - std::sqrt(2.0 * n))) <= 1e-5);
      CHECK(std::abs(translated_velocity(n, -1, v, p) - (v / std::sqrt(2 * k) + std::sqrt(2.0 * n))) <= 1e-5);
    }
  }
}

TEST_CASE("mode values") {
  const VfpParams p{0.0, 1.0};
  for (double x : {-1.0, 0.0, 2.0})
    for (double v : {-1.5, 0.0, 0.7}) {
      CHECK(vfp_mode(0, 1, x, v, p) == doctest::Approx(std::exp(-v * v / 2)).epsilon(1e-15));
      CHECK(vfp_mode(0, -1, x, v, p) == doctest::Approx(std::exp(-v * v / 2)).epsilon(1e-15));
    }
  // H_1 vanishes where the translated velocity v / sqrt(2) - sqrt(2) does
  CHECK(vfp_mode(1, 1, 0.0, 2.0, p) == 0.0);
  CHECK(vfp_mode(1, 1, 0.0, std::sqrt(2.0), p) ==
        doctest::Approx(std::exp(-std::sqrt(2.0)) * 2.0 * (1.0 - std::sqrt(2.0)) * std::exp(-std::pow(1.0 - std::sqrt(2.0), 2))));
  CHECK(vfp_linear_mode(0.3, 0.3, p) == 0.0);
}

TEST_CASE("modes solve the stationary equation") {
  for (double u : {0.0, 0.5, -1.2})
    for (int n = 0; n <= 10; ++n)
      for (int sign : {1, -1}) {
        const VfpParams p{u, 1.0};
        CHECK(mode_residual(n, sign, p, 0.02) <= 1e-8);
        // independent spot check
        double scale = 0.0, worst = 0.0;
        for (double x : {0.0, 0.5, 1.0})
          for (double v = -4.0; v <= 4.0; v += 0.5) {
            scale = std::max(scale, std::abs(vfp_mode(n, sign, x, v, p)));
            worst = std::max(worst, std::abs(fd_residual(n, sign, p, x, v)));
          }
        CHECK(worst / scale <= 1e-6);
      }
  // linear mode at u = 0
  const VfpParams p0{0.0, 1.0};
  auto lin = [&](double x, double v) { return vfp_linear_mode(x, v, p0); };
  const double h = 1e-3, x = 0.4;
  for (double v : {-1.0, 0.2, 1.5}) {
    const double fx = (lin(x + h, v) - lin(x - h, v)) / (2 * h);
    const double fv = (lin(x, v + h) - lin(x, v - h)) / (2 * h);
    const double fvv = (lin(x, v + h) - 2 * lin(x, v) + lin(x, v - h)) / (h * h);
    CHECK(std::abs(v * fx - v * fv - lin(x, v) - fvv) <= 1e-5);
  }
}

TEST_CASE("difference column tends to the linear mode") {
  const VfpParams p0{0.0, 0.8};
  for (double u : {1e-6, -1e-6, 1e-12, 1e-300}) {
    const VfpParams p{u, 0.8};
    const ModeColumn diff{0, -1, ModeColumn::difference, 0.0};
    for (double x : {0.0, 0.7})
      for (double v : {-2.0, 0.1, 1.4})
        CHECK(diff(x, v, p) == doctest::Approx(vfp_linear_mode(x, v, p0)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("half-range decomposition") {
  const VelocityGrid g = VelocityGrid::hermite(32, 1.0);
  const VfpParams p{0.5, 1.0, 8};
  const VfpBasis b(p, 1.0);
  const double L = 1.0;

  SUBCASE("single mode") {
    const Traces t = traces([&](double x, double v) { return vfp_mode(3, 1, x, v, p); }, L, g);
    const Decomposition d = half_range_decompose(t.left, t.right, b, g);
    for (std::size_t k = 0; k < d.labels.size(); ++k) {
      if (d.labels[k] == "A3")
        CHECK(d.coefficients[k] == doctest::Approx(1.0).epsilon(1e-8));
      else
        CHECK(std::abs(d.coefficients[k]) <= 1e-8);
    }
    CHECK(d.reconstruction_error <= 1e-8);
    CHECK(d.condition < kCollocationConditionMax);
  }

  SUBCASE("zero data") {
    const Decomposition d = half_range_decompose(Vec::Zero(16), Vec::Zero(16), b, g);
    CHECK(d.coefficients.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("idempotence on the span") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    Vec c(b.columns.size());
    for (auto& x : c) x = U(rng);
    const Traces t = traces(
        [&](double x, double v) {
          double s = 0.0;
          for (std::size_t k = 0; k < b.columns.size(); ++k) s += c[k] * b.columns[k](x, v, p);
          return s;
        },
        L, g);
    const Decomposition d = half_range_decompose(t.left, t.right, b, g);
    CHECK((d.coefficients - c).cwiseAbs().maxCoeff() <= 1e-8);
    const Decomposition again = half_range_decompose(t.left, t.right, b, g);
    CHECK((again.coefficients - d.coefficients).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("alpha and beta carry the diffusion modes") {
    const Traces t = traces(
        [&](double x, double v) { return 2.0 * vfp_mode(0, 1, x, v, p) - 0.5 * vfp_mode(0, -1, x, v, p); }, L, g);
    const Decomposition d = half_range_decompose(t.left, t.right, b, g);
    CHECK(d.alpha == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(d.beta == doctest::Approx(-0.5).epsilon(1e-8));
  }

  SUBCASE("Maxwellian at u = 0") {
    const VfpParams p0{0.0, 1.0, 8};
    const VfpBasis b0(p0, L);
    CHECK(b0.rank_reduced);
    const Traces t = traces([](double, double v) { return std::exp(-v * v / 2); }, L, g);
    const Decomposition d = half_range_decompose(t.left, t.right, b0, g);
    for (double x : {0.0, 0.5, 1.0}) {
      const Vec r = reconstruct(d, b0, x, g);
      CHECK((r.array() - (-g.v.array().square() / 2).exp()).abs().maxCoeff() <= 1e-8);
    }
  }

  SUBCASE("ill-conditioned truncation") {
    const VfpBasis big(VfpParams{0.5, 1.0, 15}, 1e-3);
    CHECK_THROWS_AS(half_range_decompose(Vec::Zero(16), Vec::Zero(16), big, g), TruncationError);
  }
}

TEST_CASE("scattering matrix") {
  const VelocityGrid g = VelocityGrid::hermite(32, 1.0);
  const Vec M = maxwellian(g, 1.0);
  Vec in(32);
  for (std::size_t i = 0; i < 16; ++i) in[i] = M[g.positive[i]];
  for (std::size_t i = 0; i < 16; ++i) in[16 + i] = M[g.negative[i]];
  for (auto mode : {DegenerateMode::drop, DegenerateMode::linear_response}) {
    const ScatteringMatrix s = scattering_matrix(VfpParams{0.0, 1.0, 8}, 1.0, g, mode);
    CHECK((s.map * in - in).cwiseAbs().maxCoeff() <= 1e-8);
  }
  // the drifting Maxwellian is fixed at any u
  const VfpParams p{0.6, 1.0, 8};
  const Vec Mu = maxwellian(g, 1.0, 0.6);
  for (std::size_t i = 0; i < 16; ++i) in[i] = Mu[g.positive[i]];
  for (std::size_t i = 0; i < 16; ++i) in[16 + i] = Mu[g.negative[i]];
  CHECK((scattering_matrix(p, 1.0, g).map * in - in).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(trace_increment(p, 1.0, g).rows() == 32);
  CHECK((trace_increment(p, 1.0, g) * in).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("Knudsen layer decay") {
  // non-equilibrium data in the span of Psi_0 and Psi_{+1}: the outgoing
  // deviation at x = L shrinks like exp(-mu_1 L) with mu_1 = 1/sqrt(kappa)
  const double k = 1.0;
  const VfpParams p{0.0, k, 6};
  const VelocityGrid g = VelocityGrid::hermite(24, k);
  std::vector<double> dev;
  const std::vector<double> Ls{2.0, 3.0, 4.0};
  for (double L : Ls) {
    const VfpBasis b(p, L);
    auto f = [&](double x, double v) { return vfp_mode(0, 1, x, v, p) + 0.3 * vfp_mode(1, 1, x, v, p); };
    const Traces t = traces(f, L, g);
    const Decomposition d = half_range_decompose(t.left, t.right, b, g);
    const Vec out = reconstruct(d, b, L, g);
    double worst = 0.0;
    for (int j : g.positive) worst = std::max(worst, std::abs(out[j] - std::exp(-g.v[j] * g.v[j] / (2 * k))));
    dev.push_back(worst);
  }
  for (std::size_t i = 1; i < dev.size(); ++i)
    CHECK(std::log(dev[i - 1] / dev[i]) / (Ls[i] - Ls[i - 1]) == doctest::Approx(1.0 / std::sqrt(k)).epsilon(1e-6));
}

TEST_CASE("collision step") {
  const VelocityGrid g = VelocityGrid::hermite(32, 1.0);
  // Maxwellian at the drift is a fixed point
  const auto [u1, f1] = collide_cell(0.4, maxwellian(g, 1.3, 0.4), g, 0.1);
  CHECK(u1 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK((f1 - maxwellian(g, 1.3, 0.4)).cwiseAbs().maxCoeff() <= 1e-12);
  // mass kept, momentum exchanged, positivity kept
  const Vec f0 = maxwellian(g, 0.8, -0.7) + maxwellian(g, 0.2, 1.5);
  const auto [u2, f2] = collide_cell(0.3, f0, g, 0.05);
  const Vec wv = g.weights.cwiseProduct(g.v);
  CHECK(g.weights.dot(f2) == doctest::Approx(g.weights.dot(f0)).epsilon(1e-13));
  CHECK(u2 + wv.dot(f2) == doctest::Approx(0.3 + wv.dot(f0)).epsilon(1e-13));
  CHECK(f2.minCoeff() >= 0.0);
  CHECK(std::abs(wv.dot(f2) - 0.3 * g.weights.dot(f2)) < std::abs(wv.dot(f0) - 0.3 * g.weights.dot(f0)));
  // weights integrate the normalized Maxwellian and its first moment
  CHECK(g.weights.dot(maxwellian(g, 1.0, 0.25)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wv.dot(maxwellian(g, 1.0, 0.25)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("coupled step: decoupled limit") {
  const int nc = 200;
  CoupledState s = coupled(nc, 8, [](double x) { return x < 0.3 ? 1.0 : 0.0; }, [](double) { return 1.0; },
                           [](double) { return 0.0; });
  s.f.f.setZero();
  const ScalarLaw law = ScalarLaw::burgers();
  double t = 0.0;
  while (t < 0.4 - 1e-14) {
    const double dt = std::min(coupled_max_dt(s), 0.4 - t);
    s = burgers_vfp_step(s, dt);
    t += dt;
  }
  CHECK(s.f.f.cwiseAbs().maxCoeff() == 0.0);
  // front near 0.3 + t / 2
  double front = 0.0;
  for (int i = 0; i + 1 < nc; ++i)
    if (s.u[i] >= 0.5 && s.u[i + 1] < 0.5) front = (i + 0.5) * s.dx;
  CHECK(std::abs(front - 0.5) <= 2.0 * s.dx);
}

TEST_CASE("coupled step: equilibrium stays") {
  CoupledState s = coupled(16, 16, [](double) { return 0.0; }, [](double) { return 1.0; }, [](double) { return 0.0; });
  for (int k = 0; k < 5; ++k) {
    const CoupledState next = burgers_vfp_step(s, coupled_max_dt(s));
    CHECK((next.f.f - s.f.f).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(next.u.cwiseAbs().maxCoeff() <= 1e-10);
    s = next;
  }
}

TEST_CASE("coupled step: momentum exchange") {
  CoupledState s = coupled(
      16, 16, [](double x) { return 0.5 + 0.3 * std::sin(2 * M_PI * x); },
      [](double x) { return 1.0 + 0.5 * std::cos(2 * M_PI * x); }, [](double x) { return 0.2 * std::sin(4 * M_PI * x); });
  const double p0 = s.total_momentum(), T = 0.1;
  while (s.time < T - 1e-14) s = burgers_vfp_step(s, std::min(coupled_max_dt(s), T - s.time));
  CHECK(std::abs(s.total_momentum() - p0) / T <= 1e-8);
  CHECK(s.f.f.minCoeff() >= -1e-10 * s.f.f.maxCoeff());
  // CFL guard and positivity guard
  CHECK_THROWS_AS(burgers_vfp_step(s, 2.0 * coupled_max_dt(s, 1.0)), StepRejected);
  CoupledState bad = s;
  bad.f.f(3, 5) = -1.0;
  CHECK_THROWS_AS(burgers_vfp_step(bad, coupled_max_dt(bad)), PositivityError);
}
