#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/euler_poisson.hpp"

using namespace hyplab;

namespace {

DeviceConfig uniform_device(int n, double lambda, double bias) {
  DeviceConfig c = DeviceConfig::standard(n, lambda, bias);
  c.doping = Vec::Ones(n);
  c.doping_left = c.doping_right = 1.0;
  return c;
}

void check_pair(const Pair& p, double a, double b, double tol = 1e-15) {
  CHECK(p[0] == doctest::Approx(a).epsilon(tol));
  CHECK(p[1] == doctest::Approx(b).epsilon(tol));
}

}  // namespace

TEST_CASE("Euler flux in Riemann invariants") {
  check_pair(euler_flux(1, -1), 0.0, 2.0 / 3.0);
  check_pair(euler_flux(1, 0), 0.5, 1.0 / 3.0);
  // rho u, rho u^2 + rho^3 / 12 with rho = u+ - u-, u = (u+ + u-) / 2
  for (auto [up, um] : {std::pair{2.0, 1.0}, {0.3, -1.1}, {-0.5, -2.5}}) {
    const double rho = up - um, u = 0.5 * (up + um);
    check_pair(euler_flux(up, um), rho * u, rho * u * u + rho * rho * rho / 12.0, 1e-14);
  }
  CHECK_THROWS_AS(euler_flux(0.0, 1.0), InvalidInput);
}

TEST_CASE("flux splitting") {
  SplitFlux s = split_flux(2, 1);
  check_pair(s.plus, 1.5, 7.0 / 3.0);
  check_pair(s.minus, 0.0, 0.0);
  s = split_flux(-1, -2);
  check_pair(s.plus, 0.0, 0.0);
  check_pair(s.minus, -1.5, 7.0 / 3.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int i = 0; i < 200; ++i) {
    double a = U(rng), b = U(rng);
    if (a < b) std::swap(a, b);
    const SplitFlux f = split_flux(a, b);
    const Pair sum = f.plus + f.minus, full = euler_flux(a, b);
    CHECK((sum - full).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("well-balanced interface flux") {
  WbFlux F = wb_interface_flux(1, -1, 1, -1, 0.0);
  check_pair(F.plus + F.minus, 0.0, 2.0 / 3.0);

  // zero potential jump: F+ from the left split flux, F- from the right one
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 0; i < 1000; ++i) {
    double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
    if (a < b) std::swap(a, b);
    if (c < d) std::swap(c, d);
    const WbFlux w = wb_interface_flux(a, b, c, d, 0.0);
    CHECK((w.plus - split_flux(a, b).plus).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((w.minus - split_flux(c, d).minus).cwiseAbs().maxCoeff() <= 1e-14);
  }

  // barrier far above the kinetic energy of the left particles
  F = wb_interface_flux(1.0, 0.5, 0.0, 0.0, 10.0);
  CHECK(F.plus.cwiseAbs().maxCoeff() == 0.0);

  // supersonic left state into vacuum
  F = wb_interface_flux(2.0, 1.0, 0.0, 0.0, 0.0);
  check_pair(F.plus, 1.5, 7.0 / 3.0);
  check_pair(F.minus, 0.0, 0.0);
}

TEST_CASE("Poisson solve") {
  const DeviceConfig c0 = DeviceConfig::standard(64, 0.2, 0.0);
  CHECK(poisson_solve(c0.doping, c0).phi.cwiseAbs().maxCoeff() == 0.0);

  const DeviceConfig c = DeviceConfig::standard(64, 0.2, 0.5);
  const PotentialField p = poisson_solve(c.doping, c);
  const Vec x = c.centres();
  CHECK((p.phi.array() + 0.25 * (1.0 + x.array())).abs().maxCoeff() <= 1e-12);

  // manufactured phi* = sin(pi x)(1 - x^2) - V (1 + x) / 2
  const double V = 0.3, lam = 0.05;
  std::vector<double> err;
  for (int n : {32, 64, 128, 256}) {
    DeviceConfig m = uniform_device(n, lam, V);
    const Vec xs = m.centres();
    Vec rho(n), want(n);
    for (int j = 0; j < n; ++j) {
      const double y = xs[j], s = std::sin(M_PI * y), co = std::cos(M_PI * y);
      const double d2 = -M_PI * M_PI * s * (1 - y * y) - 4 * M_PI * y * co - 2 * s;
      want[j] = s * (1 - y * y) - V * (1 + y) / 2;
      rho[j] = m.doping[j] - m.debye[j] * d2;
    }
    err.push_back((poisson_solve(rho, m).phi - want).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) >= 1.9);

  DeviceConfig bad = c;
  bad.debye[3] = 0.0;
  CHECK_THROWS_AS(poisson_solve(bad.doping, bad), ConfigError);
}

TEST_CASE("augmented potential jump") {
  CHECK(augmented_jump(0.37, 1.0, 2.0, std::numeric_limits<double>::infinity(), 0.1) == 0.37);
  CHECK(augmented_jump(0.37, 0.8, -0.8, 1.0, 0.1) == 0.37);
  CHECK(augmented_jump(0.0, 1.0, 1.0, 0.5, 0.1) == doctest::Approx(0.2));
  CHECK(augmented_jump(0.0, 1.0, 1.0, 0.5, 0.1, true) == doctest::Approx(2.0));
  CHECK_THROWS_AS(augmented_jump(0.0, 1.0, 1.0, 0.0, 0.1), ConfigError);
}

TEST_CASE("rest state is preserved") {
  const DeviceConfig c = uniform_device(64, 0.15, 0.0);
  MomentState s = rest_state(c);
  PotentialField phi = poisson_solve(s.rho, c);
  CHECK(phi.phi.cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < 100; ++k) {
    const MomentState next = device_step(s, phi, c, max_stable_dt(s, c));
    CHECK((next.rho - s.rho).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(next.momentum.cwiseAbs().maxCoeff() <= 1e-13);
    s = next;
  }
}

TEST_CASE("mass balance per step") {
  const DeviceConfig c = DeviceConfig::standard(64, 0.15, 0.2);
  MomentState s = rest_state(c);
  PotentialField phi = poisson_solve(s.rho, c);
  for (int k = 0; k < 200; ++k) {
    const double dt = max_stable_dt(s, c);
    const BoundaryFlux b = boundary_mass_flux(s, phi, c);
    const MomentState next = device_step(s, phi, c, dt);
    const double dm = c.dx() * (next.rho.sum() - s.rho.sum());
    CHECK(std::abs(dm + dt * (b.right - b.left)) <= 1e-12);
    s = next;
  }
}

TEST_CASE("steady runs") {
  // zero bias from perturbed data settles with no current
  const DeviceConfig c = DeviceConfig::standard(64, 0.15, 0.0);
  MomentState s = rest_state(c);
  const Vec x = c.centres();
  for (int j = 0; j < 64; ++j) {
    s.rho[j] *= 1.0 + 0.1 * std::exp(-40 * x[j] * x[j]);
    s.momentum[j] = 0.05 * x[j] * std::exp(-20 * x[j] * x[j]);
  }
  const DeviceRun r = run_to_steady(s, c);
  CHECK(r.converged);
  CHECK(r.state.momentum.cwiseAbs().maxCoeff() < 1e-6);

  const auto rows = iv_curve(DeviceConfig::standard(64, 0.15, 0.0), {0.0, 0.1});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].converged);
  CHECK(std::abs(rows[0].current) < 1e-6);
  CHECK(rows[1].current > rows[0].current);

  // biased undamped run is transonic
  const DeviceConfig t = DeviceConfig::standard(64, 0.15, 0.15);
  const DeviceRun rt = run_to_steady(rest_state(t), t);
  CHECK(rt.converged);
  CHECK(count_sonic_points(rt.state) == 2);
}
