#ifndef WIPLAB_PLANT_HPP_
#define WIPLAB_PLANT_HPP_

#include <Eigen/Dense>

#include "wiplab/chain.hpp"

namespace wiplab
{

constexpr double kGravity = 9.81;

// Wheel pair, lumped: radius, combined mass, combined axle inertia.
struct WheelParams
{
  double radius = 0.25;
  double mass = 12.0;
  double inertia = 0.375;
};

// Locked-joint chain collapsed to a single rigid link on wheels.
// theta is the pitch of the axle-to-CoM line from vertical.
struct AggregateBody
{
  double mass = 0.0;         // kg, sum of beta mass blocks
  double com_distance = 0.0; // m, axle to CoM
  double balance_pitch = 0.0;  // rad, CoM-line pitch at the aggregated pose
  double axle_inertia = 0.0;   // kg m^2, links as point masses at their CoMs
};

struct WipState
{
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  Eigen::Vector4d vec() const { return {x, x_dot, theta, theta_dot}; }
  static WipState from_vec(const Eigen::Vector4d & v) { return {v(0), v(1), v(2), v(3)}; }
};

struct Linearization
{
  Eigen::Matrix4d A;
  Eigen::Vector4d B;  // [0, b_x, 0, b_theta] per state ordering
  double b_x = 0.0;
  double b_theta = 0.0;
};

AggregateBody aggregate(const ChainGeometry & geom, const Pose & locked, const Beta & beta);

// Wheel + pendulum equations, solved as a 2x2 linear system for the
// accelerations each call. tau_w is the summed wheel torque, tau_d an
// external disturbance torque about the axle.
Eigen::Vector4d dynamics(const AggregateBody & body, const WheelParams & wheels,
                         const WipState & state, double tau_w, double tau_d);

// Kinetic + potential energy of the unforced plant; constant along
// frictionless trajectories, used as the integrator check.
double mechanical_energy(const AggregateBody & body, const WheelParams & wheels,
                         const WipState & state);

// Analytic Jacobian at the upright equilibrium.
Linearization linearize(const AggregateBody & body, const WheelParams & wheels);

// One RK4 step with torques held constant over the step.
WipState step(const AggregateBody & body, const WheelParams & wheels, const WipState & state,
              double tau_w, double tau_d, double dt);

}  // namespace wiplab

#endif  // WIPLAB_PLANT_HPP_
