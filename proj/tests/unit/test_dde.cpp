#include <doctest.h>

#include <cmath>

#include "csync/dde.hpp"

using namespace csync;

namespace {

// x' = -x(t - 1), x = 1 for t <= 0, solved by the method of steps.
double exact(double t) {
  if (t <= 1.0) return 1.0 - t;
  if (t <= 2.0) return 1.0 - t + (t - 1) * (t - 1) / 2.0;
  return 1.0 - t + (t - 1) * (t - 1) / 2.0 - std::pow(t - 2, 3) / 6.0;
}

double solve_to(double horizon, double dt) {
  DelayIntegrator integ(1, {1.0}, aligned_step(dt, {1.0}),
                        [](double, const double*, const double* const* d, double* dx) { dx[0] = -d[0][0]; },
                        Vector::Ones(1));
  integ.advance(std::lround(horizon / integ.dt()));
  return integ.state()[0];
}

}  // namespace

TEST_CASE("aligned step") {
  CHECK(aligned_step(0.01, {}) == 0.01);
  CHECK(aligned_step(0.01, {0.0, 2.0}) == doctest::Approx(0.01));
  const double dt = aligned_step(0.03, {1.0});
  CHECK(dt <= 0.03);
  CHECK(std::abs(1.0 / dt - std::round(1.0 / dt)) < 1e-9);
  const double both = aligned_step(0.01, {0.5, 0.3});
  CHECK(std::abs(0.5 / both - std::round(0.5 / both)) < 1e-9);
  CHECK(std::abs(0.3 / both - std::round(0.3 / both)) < 1e-9);
  CHECK_THROWS_AS(aligned_step(0.0, {1.0}), std::invalid_argument);
}

TEST_CASE("method-of-steps solution") {
  for (double t : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    CAPTURE(t);
    CHECK(std::abs(solve_to(t, 0.01) - exact(t)) < 1e-9);
  }
}

TEST_CASE("fourth order convergence") {
  // Beyond t = 3 the reference comes from a fine step.
  const double ref = solve_to(6.0, 0.00125);
  const double e1 = std::abs(solve_to(6.0, 0.04) - ref);
  const double e2 = std::abs(solve_to(6.0, 0.02) - ref);
  CHECK(e1 / e2 > 12.0);

  DelayIntegrator ode(1, {}, 0.1, [](double, const double* x, const double* const*, double* dx) { dx[0] = x[0]; },
                      Vector::Ones(1));
  ode.advance(10);
  CHECK(ode.state()[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-5));
  CHECK(ode.time() == doctest::Approx(1.0));
}

TEST_CASE("history access and rescaling") {
  DelayIntegrator integ(1, {0.5}, 0.1, [](double, const double*, const double* const*, double* dx) { dx[0] = 1.0; },
                        Vector::Zero(1));
  CHECK(integ.max_lag() == 5);
  CHECK(integ.lag_steps(0) == 5);
  integ.advance(10);
  CHECK(integ.state()[0] == doctest::Approx(1.0));
  CHECK(integ.lagged(5)[0] == doctest::Approx(0.5));
  integ.transform_history([](double* x, double* dx) {
    x[0] *= 2.0;
    dx[0] *= 2.0;
  });
  CHECK(integ.state()[0] == doctest::Approx(2.0));
  CHECK(integ.lagged(5)[0] == doctest::Approx(1.0));
}
