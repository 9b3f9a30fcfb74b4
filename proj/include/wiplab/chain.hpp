#ifndef WIPLAB_CHAIN_HPP_
#define WIPLAB_CHAIN_HPP_

#include <vector>

#include <Eigen/Dense>

#include "wiplab/common.hpp"

namespace wiplab
{

// Joint angles, q(0) is the base-link pitch from vertical.
using Pose = Eigen::VectorXd;

// Stacked per-link [m*x, m*y, m*z, m] blocks, 4L entries.
using Beta = Eigen::VectorXd;

// Planar sagittal chain on a wheel axle. Frame 0 sits at the axle
// midpoint, x along heading, z vertical. All joints pitch about the
// axle direction; q1 = 0 means the base link points straight up.
struct ChainGeometry
{
  int link_count = 0;
  std::vector<double> link_lengths;  // meters
  std::vector<double> limit_lo;      // radians
  std::vector<double> limit_hi;
  double total_mass = 0.0;    // kg, body links only; weighed once, treated as known
  double wheel_radius = 0.25;
  double wheel_mass = 12.0;       // both wheels combined
  double wheel_inertia = 0.375;   // both wheels combined, about the axle

  void validate() const;
  bool pose_within_limits(const Pose & q) const;

  // 7-link desk model; lengths and limits are configuration defaults,
  // not measured values.
  static ChainGeometry default_seven_link();
};

struct ComCoordinates
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// T_i^0 for every link. Rotation of frame i is a pitch by the cumulative
// angle sum(q_1..q_i) measured from vertical; origins chain along each
// link's local x axis.
std::vector<Eigen::Matrix4d> forward_transforms(const ChainGeometry & geom, const Pose & q);

// phi(q): block i = (first row of T_i^0) / M, so that x_com = phi' * beta
// for any beta. The y entry of every block is exactly zero in the planar
// model.
Eigen::VectorXd feature_vector(const ChainGeometry & geom, const Pose & q);

// All three CoM coordinates by mass-weighted summation of per-link CoMs
// recovered from beta (divided by the known total mass, matching phi).
ComCoordinates com_of(const ChainGeometry & geom, const Pose & q, const Beta & beta);

// Root of x_com(q1) with the CoM above the axle, found by bracketing +
// bisection on [-pi, pi]. Throws DegenerateConfigurationError when the
// CoM is coincident with the axle.
double solve_balance_angle(const ChainGeometry & geom, const Pose & locked, const Beta & beta);

}  // namespace wiplab

#endif  // WIPLAB_CHAIN_HPP_
