#include "wiplab/adrc.hpp"

#include <cmath>

#include "wiplab/care.hpp"

namespace wiplab
{

EsoGains eso_gains(double omega_o)
{
  if (!(omega_o > 0.0)) {
    throw InvalidParameterError("eso_gains: omega_o must be positive");
  }
  return {3.0 * omega_o, 3.0 * omega_o * omega_o, omega_o * omega_o * omega_o};
}

EsoState eso_step(const EsoState & eso, double measured, double u, double b,
                  const EsoGains & gains, double dt, bool input_injection)
{
  const double bu = input_injection ? b * u : 0.0;
  auto f = [&](const Eigen::Vector3d & z) -> Eigen::Vector3d {
    const double e = measured - z(0);
    return {z(1) + gains.l1 * e, z(2) + gains.l2 * e + bu, gains.l3 * e};
  };
  const Eigen::Vector3d z0{eso.pos, eso.vel, eso.dist};
  const Eigen::Vector3d k1 = f(z0);
  const Eigen::Vector3d k2 = f(z0 + 0.5 * dt * k1);
  const Eigen::Vector3d k3 = f(z0 + 0.5 * dt * k2);
  const Eigen::Vector3d k4 = f(z0 + dt * k3);
  const Eigen::Vector3d z1 = z0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!z1.allFinite()) {
    throw SimulationDivergedError("eso_step: observer diverged");
  }
  return {z1(0), z1(1), z1(2)};
}

LqrGains lqr_gains(const Linearization & lin, const Eigen::Vector4d & q_diag, double r_weight)
{
  if (!(r_weight > 0.0)) {
    throw InvalidParameterError("lqr_gains: control weight must be positive");
  }
  const Eigen::MatrixXd Q = q_diag.asDiagonal();
  Eigen::MatrixXd R(1, 1);
  R(0, 0) = r_weight;
  const Eigen::MatrixXd P = solve_care(lin.A, lin.B, Q, R);
  LqrGains g;
  g.P = P;
  g.F = (lin.B.transpose() * P) / r_weight;
  g.F_x = {g.F(0), g.F(1)};
  g.F_theta = {g.F(2), g.F(3)};
  if (max_real_eigenvalue(lin.A - lin.B * g.F) >= 0.0) {
    throw ConvergenceError("lqr_gains: synthesized gain does not stabilize the linearization");
  }
  return g;
}

TorqueCommand adrc_torque(const LqrGains & gains, const EsoState & eso_x,
                          const EsoState & eso_theta, double x_err, double x_rate,
                          double theta_err, double theta_rate, double b_x, double b_theta,
                          double tau_max, bool compensation)
{
  if (std::abs(b_x) < 1e-9 || std::abs(b_theta) < 1e-9) {
    throw InvalidParameterError("adrc_torque: vanishing input gain");
  }
  TorqueCommand cmd;
  cmd.u_x = -(gains.F_x(0) * x_err + gains.F_x(1) * x_rate);
  cmd.u_theta = -(gains.F_theta(0) * theta_err + gains.F_theta(1) * theta_rate);
  double tau = cmd.u_x + cmd.u_theta;
  if (compensation) {
    tau -= eso_x.dist / b_x + eso_theta.dist / b_theta;
  }
  if (tau > tau_max) {
    tau = tau_max;
    cmd.saturated = true;
  } else if (tau < -tau_max) {
    tau = -tau_max;
    cmd.saturated = true;
  }
  cmd.tau = tau;
  return cmd;
}

AdrcController::AdrcController(const Linearization & lin, const ControllerConfig & cfg)
: gains_(lqr_gains(lin, cfg.q_diag, cfg.r_weight)),
  obs_gains_(eso_gains(cfg.omega_o)),
  b_x_(lin.b_x),
  b_theta_(lin.b_theta),
  cfg_(cfg)
{
}

void AdrcController::reset(double x_meas, double theta_meas)
{
  eso_x_ = {x_meas, 0.0, 0.0};
  eso_theta_ = {theta_meas, 0.0, 0.0};
}

TorqueCommand AdrcController::control(double x_meas, double theta_meas, double x_ref,
                                      double theta_ref, double true_x_rate,
                                      double true_theta_rate)
{
  const double x_rate = cfg_.use_true_rates ? true_x_rate : eso_x_.vel;
  const double theta_rate = cfg_.use_true_rates ? true_theta_rate : eso_theta_.vel;
  const TorqueCommand cmd =
      adrc_torque(gains_, eso_x_, eso_theta_, x_meas - x_ref, x_rate, theta_meas - theta_ref,
                  theta_rate, b_x_, b_theta_, cfg_.tau_max, cfg_.compensation);
  eso_x_ = eso_step(eso_x_, x_meas, cmd.u_x, b_x_, obs_gains_, cfg_.control_dt,
                    cfg_.input_injection);
  eso_theta_ = eso_step(eso_theta_, theta_meas, cmd.u_theta, b_theta_, obs_gains_,
                        cfg_.control_dt, cfg_.input_injection);
  return cmd;
}

BalanceResult balance_run(const ChainGeometry & geom, const Pose & locked, const Beta & beta_true,
                          const Beta & beta_est, const BalanceRunConfig & cfg)
{
  const double q1_believed = solve_balance_angle(geom, locked, beta_est);
  Pose pose = locked;
  pose(0) = q1_believed;

  const WheelParams wheels{geom.wheel_radius, geom.wheel_mass, geom.wheel_inertia};
  const AggregateBody body_est = aggregate(geom, pose, beta_est);
  const AggregateBody body_true = aggregate(geom, pose, beta_true);
  const Linearization lin_est = linearize(body_est, wheels);

  // Constant offset between the pitch the controller believes and the
  // pitch of the true CoM line; this is what the ESOs must reject.
  const double pitch_offset = body_est.balance_pitch - body_true.balance_pitch;

  AdrcController controller(lin_est, cfg.controller);
  const double dt = cfg.controller.control_dt;

  WipState state;
  state.theta = body_true.balance_pitch;
  controller.reset(state.x, state.theta + pitch_offset);

  BalanceResult result;
  const int n_steps = static_cast<int>(std::ceil(cfg.duration / dt));
  const int hold_steps = static_cast<int>(std::round(cfg.settle_hold / dt));
  int quiet_steps = 0;

  for (int k = 0; k < n_steps; ++k) {
    const double t = k * dt;
    const TorqueCommand cmd = controller.control(state.x, state.theta + pitch_offset, 0.0, 0.0,
                                                 state.x_dot, state.theta_dot);
    if (cfg.record_trace) {
      result.trace.push_back({t, state.x, state.x_dot, state.theta, state.theta_dot, cmd.tau,
                              controller.eso_x().dist, controller.eso_theta().dist,
                              cmd.saturated});
    }
    result.peak_torque = std::max(result.peak_torque, std::abs(cmd.tau));
    state = step(body_true, wheels, state, cmd.tau, 0.0, dt);

    if (std::abs(state.theta) > M_PI / 2.0) {
      throw SimulationDivergedError("balance_run: plant fell over");
    }
    if (std::abs(state.theta_dot) < cfg.settle_rate_tol && std::abs(state.x_dot) < cfg.settle_rate_tol) {
      if (++quiet_steps >= hold_steps) {
        result.settled = true;
        result.settle_time = t + dt;
        break;
      }
    } else {
      quiet_steps = 0;
    }
  }

  result.settled_pose = pose;
  result.settled_pose(0) = q1_believed + (state.theta - body_true.balance_pitch);
  result.settled_xcom = com_of(geom, result.settled_pose, beta_true).x;
  return result;
}

}  // namespace wiplab
