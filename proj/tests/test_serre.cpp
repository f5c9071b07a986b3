#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hyplab/serre.hpp"

using namespace hyplab;

namespace {

// tanh(x)/x by its Taylor series; independent of the library's table.
double thc_series(double x) {
  const double x2 = x * x;
  return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0 - 17.0 * x2 * x2 * x2 / 315.0 + 62.0 * std::pow(x2, 4) / 2835.0;
}

double loglog_slope(double alpha) {
  const double k0 = 1e-3, k1 = 1e-1;
  return std::log(std::abs(dispersion_error(k1, alpha)) / std::abs(dispersion_error(k0, alpha))) / std::log(k1 / k0);
}

}  // namespace

TEST_CASE("vertical acceleration") {
  PeriodicGrid g(64, 2 * M_PI);
  RealField one(g, Vec::Ones(64)), zero(g), c(g, Vec::Constant(64, 0.7));
  auto h = RealField::from_function(g, [](double x) { return 1.0 + 0.2 * std::cos(x); });
  CHECK(vertical_acceleration(h, c, zero).samples.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(vertical_acceleration(one, zero, zero).samples.cwiseAbs().maxCoeff() == 0.0);

  auto s = RealField::from_function(g, [](double x) { return std::sin(x); });
  const Vec gamma = vertical_acceleration(one, s, zero).samples;
  CHECK((gamma.array() - 1.0).abs().maxCoeff() <= 1e-12);

  // alpha = 1 reduces to the SGN closure
  const Vec a1 = vertical_acceleration_alpha(h, s, zero, 9.81, 1.0).samples;
  CHECK((a1 - vertical_acceleration(h, s, zero).samples).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("dispersion relation values") {
  for (double a : {1.0, 1.2, 3.0}) CHECK(esgn_dispersion(0.0, a) == 1.0);
  CHECK(esgn_dispersion(1e8, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(esgn_dispersion(1e8, 1.2) == doctest::Approx(0.2 / 1.2).epsilon(1e-12));
  CHECK(exact_dispersion(0.0) == 1.0);
  CHECK(exact_dispersion(1.0) == doctest::Approx(0.7615941559557649).epsilon(1e-15));
  CHECK_THROWS_AS(esgn_dispersion(1.0, 0.5), IllPosed);
  CHECK_THROWS_AS(dispersion_error(1.0, 0.99), IllPosed);
}

TEST_CASE("dispersion Taylor coefficients") {
  // 1/(1 + alpha x^2/3) expansion of the rational relation: x^4 coefficient alpha/9
  const double alpha = 1.2;
  CHECK(alpha / 9.0 == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  const double kd = 0.1;
  CHECK(std::abs(exact_dispersion(kd) - thc_series(kd)) <= 1e-10);
  // series coefficients from finite differences of thc at tiny kd
  const double x = 0.01, x2 = x * x;
  const double c2 = (exact_dispersion(x) - 1.0) / x2;
  CHECK(c2 == doctest::Approx(-1.0 / 3.0).epsilon(1e-4));
  const double c4 = (exact_dispersion(0.1) - 1.0 + 0.01 / 3.0) / 1e-4;
  CHECK(c4 == doctest::Approx(2.0 / 15.0).epsilon(1e-2));
}

TEST_CASE("dispersion error order") {
  CHECK(loglog_slope(1.2) == doctest::Approx(6.0).epsilon(0.2 / 6.0));
  CHECK(loglog_slope(1.0) == doctest::Approx(4.0).epsilon(0.2 / 4.0));
  CHECK(loglog_slope(2.0) == doctest::Approx(4.0).epsilon(0.2 / 4.0));
  // cancellation-free evaluation agrees with direct subtraction where the latter is accurate
  for (double kd : {0.2, 0.4, 0.5})
    CHECK(dispersion_error(kd, 1.2) ==
          doctest::Approx(esgn_dispersion(kd, 1.2) - std::tanh(kd) / kd).epsilon(1e-9));
}

TEST_CASE("SGN solitary wave") {
  for (double a : {0.1, 0.45, 0.7}) {
    const SolitaryWave w = sgn_solitary(a);
    CHECK(w.speed_ratio == doctest::Approx(std::sqrt(1.0 + a)).epsilon(1e-14));
    const double k = std::sqrt(3.0 * a / (1.0 + a));
    const Vec x = w.profile.grid.nodes();
    double err = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j)
      err = std::max(err, std::abs(w.profile.samples[j] - a / std::pow(std::cosh(0.5 * k * x[j]), 2)));
    CHECK(err <= 1e-12);
  }
  CHECK_THROWS_AS(sgn_solitary(-0.1), InvalidInput);
}

TEST_CASE("eSGN solitary wave") {
  // alpha = 1 is the SGN closure
  const SolitaryWave s1 = esgn_solitary(0.3, 1.0);
  CHECK(s1.speed_ratio == doctest::Approx(std::sqrt(1.3)).epsilon(1e-8));

  const SolitaryWave w = esgn_solitary(0.45, 1.2);
  CHECK(std::abs(w.speed_ratio - 1.1999) <= 5e-4);
  CHECK(w.profile.samples.maxCoeff() == doctest::Approx(0.45).epsilon(1e-10));
  CHECK(w.profile.samples.minCoeff() >= -1e-10);

  // rigid translation at c solves the model equations
  const PeriodicGrid& g = w.profile.grid;
  const double c = w.speed_ratio;
  RealField h(g, (1.0 + w.profile.samples.array()).matrix());
  RealField u(g, (c * (1.0 - 1.0 / h.samples.array())).matrix());
  CHECK(traveling_residual(h, u, c, 1.0, 1.2).max() <= 1e-6);

  // tail decays at the linear rate
  CHECK(tail_decay_rate(c, 1.0, 1.0, 1.2) > 0.0);
  CHECK_THROWS_AS(tail_decay_rate(0.9, 1.0, 1.0, 1.2), InvalidInput);
  CHECK_THROWS_AS(esgn_solitary(0.1, 0.8), IllPosed);
}

TEST_CASE("speed-amplitude sweep") {
  CHECK(speed_amplitude_sweep("sgn", {}).empty());
  const auto rows = speed_amplitude_sweep("esgn", {0.1, 0.45, 0.7}, 1.2);
  REQUIRE(rows.size() == 3);
  const double want[] = {1.04856, 1.1999, 1.2946}, tol[] = {5e-5, 5e-4, 5e-4};
  for (int i = 0; i < 3; ++i) {
    CHECK(rows[i].ok);
    CHECK(std::abs(rows[i].speed_ratio - want[i]) <= tol[i]);
  }
  // speed increases with amplitude, and eSGN sits below SGN
  CHECK(rows[0].speed_ratio < rows[1].speed_ratio);
  CHECK(rows[1].speed_ratio < rows[2].speed_ratio);
  for (const auto& r : rows) CHECK(r.speed_ratio < std::sqrt(1.0 + r.amplitude_ratio));
  CHECK_THROWS(speed_amplitude_sweep("kdv", {0.1}));
}
