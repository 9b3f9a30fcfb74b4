#ifndef WIPLAB_ADRC_HPP_
#define WIPLAB_ADRC_HPP_

#include <vector>

#include <Eigen/Dense>

#include "wiplab/plant.hpp"

namespace wiplab
{

struct LqrGains
{
  Eigen::RowVector4d F;       // full-state gain, u = -F X
  Eigen::Vector2d F_x;        // gains on [x, x_dot]
  Eigen::Vector2d F_theta;    // gains on [theta, theta_dot]
  Eigen::Matrix4d P;          // Riccati solution
};

struct EsoGains
{
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

// One third-order observer channel: position, velocity and total
// disturbance estimates.
struct EsoState
{
  double pos = 0.0;
  double vel = 0.0;
  double dist = 0.0;
};

struct ControllerConfig
{
  Eigen::Vector4d q_diag{300.0, 100.0, 500.0, 200.0};
  double r_weight = 1.0;
  double omega_o = 50.0;       // rad/s observer bandwidth, both channels
  double tau_max = 60.0;       // N m
  double control_dt = 1e-3;    // s, 1 kHz
  bool input_injection = true;   // false reproduces the literal printed observer
  bool use_true_rates = false;   // debug: feed back plant rates instead of estimates
  bool compensation = true;      // false: plain LQR without disturbance cancellation
};

struct TorqueCommand
{
  double tau = 0.0;
  double u_x = 0.0;
  double u_theta = 0.0;
  bool saturated = false;
};

// All three observer poles at -omega_o: (3 w, 3 w^2, w^3).
EsoGains eso_gains(double omega_o);

// One RK4 step of the observer with measurement and input held constant.
EsoState eso_step(const EsoState & eso, double measured, double u, double b,
                  const EsoGains & gains, double dt, bool input_injection = true);

// Full-state LQR on the coupled 4-state linearization, split into the
// x and theta subsystem gains.
LqrGains lqr_gains(const Linearization & lin, const Eigen::Vector4d & q_diag, double r_weight);

// LQR feedback plus feedback-linearizing disturbance cancellation,
// saturated at tau_max.
TorqueCommand adrc_torque(const LqrGains & gains, const EsoState & eso_x,
                          const EsoState & eso_theta, double x_err, double x_rate,
                          double theta_err, double theta_rate, double b_x, double b_theta,
                          double tau_max, bool compensation = true);

// Twin-observer ADRC loop for one locked pose. Owns mutable observer
// state; gain synthesis happens in the constructor.
class AdrcController
{
public:
  AdrcController(const Linearization & lin, const ControllerConfig & cfg);

  // Computes the wheel torque from the current estimates, then advances
  // both observers with the supplied measurements.
  TorqueCommand control(double x_meas, double theta_meas, double x_ref, double theta_ref,
                        double true_x_rate = 0.0, double true_theta_rate = 0.0);

  void reset(double x_meas, double theta_meas);

  const LqrGains & gains() const { return gains_; }
  const EsoState & eso_x() const { return eso_x_; }
  const EsoState & eso_theta() const { return eso_theta_; }
  double b_x() const { return b_x_; }
  double b_theta() const { return b_theta_; }

private:
  LqrGains gains_;
  EsoGains obs_gains_;
  EsoState eso_x_;
  EsoState eso_theta_;
  double b_x_;
  double b_theta_;
  ControllerConfig cfg_;
};

struct TraceRow
{
  double t = 0.0;
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double tau = 0.0;
  double f_x_hat = 0.0;
  double f_theta_hat = 0.0;
  bool saturated = false;
};

struct BalanceRunConfig
{
  double duration = 30.0;       // s
  double settle_rate_tol = 1e-4;
  double settle_hold = 1.0;     // s both rates must stay below tol
  ControllerConfig controller;
  bool record_trace = true;
};

struct BalanceResult
{
  bool settled = false;
  double settle_time = 0.0;
  Pose settled_pose;        // locked joints with the realized base pitch
  double settled_xcom = 0.0;  // true x_com at the settled pose
  double peak_torque = 0.0;
  std::vector<TraceRow> trace;
};

// Closed loop of the true plant against a controller synthesized from the
// estimated parameters. The controller's pitch measurement is offset by
// its believed balance angle, so the CoM error appears to it as a
// constant disturbance. locked(0) is ignored; the run starts at the
// balance angle the estimate believes in.
BalanceResult balance_run(const ChainGeometry & geom, const Pose & locked, const Beta & beta_true,
                          const Beta & beta_est, const BalanceRunConfig & cfg);

}  // namespace wiplab

#endif  // WIPLAB_ADRC_HPP_
