#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wiplab/adrc.hpp"
#include "wiplab/care.hpp"
#include "wiplab/mass_model.hpp"

using namespace wiplab;

namespace
{

Linearization default_lin()
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  const auto body = aggregate(g, Pose::Zero(7), truth);
  const WheelParams wheels{g.wheel_radius, g.wheel_mass, g.wheel_inertia};
  return linearize(body, wheels);
}

// Runs the observer against the analytic trajectory of a double
// integrator with constant input and constant disturbance, and returns
// the disturbance-estimate error at time t_end.
double eso_dist_error_at(double t_end, double u, double b, double f, bool injection,
                         double dt = 1e-4)
{
  const auto gains = eso_gains(50.0);
  const double accel = b * u + f;
  EsoState eso;
  const int n = static_cast<int>(std::round(t_end / dt));
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    eso = eso_step(eso, 0.5 * accel * t * t, u, b, gains, dt, injection);
  }
  const double expected = injection ? f : f + b * u;
  return std::abs(eso.dist - expected);
}

}  // namespace

TEST_CASE("observer gains place all poles at -omega_o")
{
  const auto g = eso_gains(50.0);
  CHECK(g.l1 == 150.0);
  CHECK(g.l2 == 7500.0);
  CHECK(g.l3 == 125000.0);
  // error matrix A - L C has characteristic polynomial (s + w)^3
  Eigen::Matrix3d E;
  E << -g.l1, 1.0, 0.0, -g.l2, 0.0, 1.0, -g.l3, 0.0, 0.0;
  CHECK(E.trace() == doctest::Approx(-150.0));
  CHECK(E.determinant() == doctest::Approx(-125000.0));
  CHECK_THROWS_AS(eso_gains(0.0), InvalidParameterError);
}

TEST_CASE("observer recovers a constant disturbance")
{
  // thresholds follow the (1 + wt + (wt)^2 / 2) exp(-wt) envelope of the
  // triple pole at -w
  CHECK(eso_dist_error_at(10.0 / 50.0, 0.0, 1.0, 1.0, true) < 1e-2);
  // the zero-order-hold measurement leaves an O(dt^2) floor, so the tight
  // continuum check needs a fine step
  CHECK(eso_dist_error_at(30.0 / 50.0, 0.0, 1.0, 1.0, true, 5e-6) < 1e-6);
}

TEST_CASE("without input injection the known input folds into the disturbance")
{
  CHECK(eso_dist_error_at(30.0 / 50.0, 2.0, 1.5, 0.7, true, 5e-6) < 1e-6);
  CHECK(eso_dist_error_at(30.0 / 50.0, 2.0, 1.5, 0.7, false, 5e-6) < 1e-6);
}

TEST_CASE("injection flag is irrelevant for zero input")
{
  const auto gains = eso_gains(50.0);
  EsoState a, b;
  for (int k = 0; k < 100; ++k) {
    a = eso_step(a, 0.01 * k, 0.0, 2.0, gains, 1e-3, true);
    b = eso_step(b, 0.01 * k, 0.0, 2.0, gains, 1e-3, false);
  }
  CHECK(a.pos == b.pos);
  CHECK(a.vel == b.vel);
  CHECK(a.dist == b.dist);
}

TEST_CASE("observer error decays from a wrong initial state")
{
  const auto gains = eso_gains(50.0);
  EsoState eso{1.0, -2.0, 3.0};
  for (int k = 0; k < 10000; ++k) {
    eso = eso_step(eso, 0.0, 0.0, 1.0, gains, 1e-4, true);
  }
  CHECK(std::abs(eso.pos) < 1e-9);
  CHECK(std::abs(eso.vel) < 1e-9);
  CHECK(std::abs(eso.dist) < 1e-9);
}

TEST_CASE("LQR gain splits consistently and stabilizes the linearization")
{
  const auto lin = default_lin();
  const Eigen::Vector4d qd{300.0, 100.0, 500.0, 200.0};
  const auto g = lqr_gains(lin, qd, 1.0);
  CHECK(g.F(0) == g.F_x(0));
  CHECK(g.F(1) == g.F_x(1));
  CHECK(g.F(2) == g.F_theta(0));
  CHECK(g.F(3) == g.F_theta(1));
  CHECK(max_real_eigenvalue(lin.A - lin.B * g.F) < 0.0);
  CHECK_THROWS_AS(lqr_gains(lin, qd, 0.0), InvalidParameterError);
}

TEST_CASE("torque command reproduces the hand-computed control law")
{
  const auto lin = default_lin();
  const auto g = lqr_gains(lin, {300.0, 100.0, 500.0, 200.0}, 1.0);
  const EsoState ex{0.1, 0.2, 0.5};
  const EsoState et{-0.05, 0.1, -0.3};
  const double x_err = 0.02, x_rate = -0.01, t_err = 0.03, t_rate = 0.04;
  const auto cmd =
      adrc_torque(g, ex, et, x_err, x_rate, t_err, t_rate, lin.b_x, lin.b_theta, 1e9, true);
  const double ux = -(g.F_x(0) * x_err + g.F_x(1) * x_rate);
  const double ut = -(g.F_theta(0) * t_err + g.F_theta(1) * t_rate);
  CHECK(cmd.u_x == doctest::Approx(ux).epsilon(1e-15));
  CHECK(cmd.u_theta == doctest::Approx(ut).epsilon(1e-15));
  CHECK(cmd.tau ==
        doctest::Approx(ux + ut - ex.dist / lin.b_x - et.dist / lin.b_theta).epsilon(1e-15));
  CHECK_FALSE(cmd.saturated);

  SUBCASE("compensation off drops the disturbance terms")
  {
    const auto plain =
        adrc_torque(g, ex, et, x_err, x_rate, t_err, t_rate, lin.b_x, lin.b_theta, 1e9, false);
    CHECK(plain.tau == doctest::Approx(ux + ut).epsilon(1e-15));
  }

  SUBCASE("saturation clamps and flags")
  {
    const auto sat =
        adrc_torque(g, ex, et, 10.0, 0.0, 0.0, 0.0, lin.b_x, lin.b_theta, 1.0, true);
    CHECK(std::abs(sat.tau) == 1.0);
    CHECK(sat.saturated);
  }

  SUBCASE("vanishing input gain is rejected")
  {
    CHECK_THROWS_AS(adrc_torque(g, ex, et, 0.0, 0.0, 0.0, 0.0, 0.0, lin.b_theta, 1.0, true),
                    InvalidParameterError);
  }
}

TEST_CASE("controller holds the true plant upright from a small tilt")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  const auto body = aggregate(g, Pose::Zero(7), truth);
  const WheelParams wheels{g.wheel_radius, g.wheel_mass, g.wheel_inertia};
  const auto lin = linearize(body, wheels);
  ControllerConfig cfg;
  AdrcController controller(lin, cfg);

  WipState state;
  state.theta = 0.05;
  controller.reset(state.x, state.theta);
  double peak_x = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto cmd = controller.control(state.x, state.theta, 0.0, 0.0);
    state = step(body, wheels, state, cmd.tau, 0.0, cfg.control_dt);
    peak_x = std::max(peak_x, std::abs(state.x));
  }
  CHECK(std::abs(state.theta) < 1e-3);
  CHECK(std::abs(state.theta_dot) < 1e-3);
  CHECK(std::abs(state.x) < 1e-2);
  CHECK(peak_x < 1.0);
}

TEST_CASE("balance run with the exact estimate stays put")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  BalanceRunConfig cfg;
  cfg.record_trace = false;
  const auto res = balance_run(g, Pose::Zero(7), truth, truth, cfg);
  CHECK(res.settled);
  CHECK(std::abs(res.settled_xcom) < 1e-6);
  CHECK(std::abs(res.settled_pose(0)) < 1e-6);
  CHECK(res.trace.empty());
}

TEST_CASE("balance run settles at the true balance angle under a wrong estimate")
{
  const auto g = ChainGeometry::default_seven_link();
  const Beta truth = make_default_truth(g);
  const Beta est = perturb(truth, 0.2, 404);
  Pose locked = Pose::Zero(7);
  locked(1) = 0.3;
  locked(2) = -0.4;
  locked(4) = 0.5;

  BalanceRunConfig cfg;
  const auto res = balance_run(g, locked, truth, est, cfg);
  CHECK(res.settled);
  CHECK(std::abs(res.settled_xcom) < 1e-3);
  const double q1_true = solve_balance_angle(g, locked, truth);
  CHECK(std::abs(res.settled_pose(0) - q1_true) < 2e-3);
  CHECK(res.peak_torque > 0.0);
  CHECK_FALSE(res.trace.empty());
  CHECK(res.trace.front().t == 0.0);
}
