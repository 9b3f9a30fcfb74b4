#include "wiplab/plant.hpp"

#include <cmath>

namespace wiplab
{

AggregateBody aggregate(const ChainGeometry & geom, const Pose & locked, const Beta & beta)
{
  const auto transforms = forward_transforms(geom, locked);
  const int L = geom.link_count;
  if (beta.size() != 4 * L) {
    throw InvalidParameterError("aggregate: beta length must be 4L");
  }
  AggregateBody body;
  double inertia = 0.0;
  for (int i = 0; i < L; ++i) {
    const double m_i = beta(4 * i + 3);
    if (!(m_i > 0.0)) {
      throw InvalidParameterError("aggregate: nonpositive link mass in beta");
    }
    body.mass += m_i;
    // world CoM of link i; beta block is mass times homogeneous local CoM
    const Eigen::Vector4d mc = transforms[i] * beta.segment<4>(4 * i);
    const double cx = mc(0) / m_i, cz = mc(2) / m_i;
    inertia += m_i * (cx * cx + cz * cz);
  }
  const ComCoordinates com = com_of(geom, locked, beta);
  // com_of divides by the nominal total mass; rescale to this beta's mass sum
  const double scale = geom.total_mass / body.mass;
  const double cx = com.x * scale, cz = com.z * scale;
  body.com_distance = std::hypot(cx, cz);
  if (body.com_distance < 1e-9) {
    throw DegenerateConfigurationError("aggregate: CoM coincident with wheel axle");
  }
  body.balance_pitch = std::atan2(cx, cz);
  body.axle_inertia = inertia;
  return body;
}

Eigen::Vector4d dynamics(const AggregateBody & body, const WheelParams & wheels,
                         const WipState & state, double tau_w, double tau_d)
{
  const double m = body.mass;
  const double l = body.com_distance;
  const double ia = body.axle_inertia;
  const double r = wheels.radius;
  const double mt = m + wheels.mass + wheels.inertia / (r * r);
  const double s = std::sin(state.theta);
  const double c = std::cos(state.theta);

  // [ mt        m l c ] [xdd]   [ tau_w / r + m l s thd^2 ]
  // [ m l c     ia    ] [thd] = [ -tau_w + tau_d + m g l s ]
  const double a11 = mt, a12 = m * l * c;
  const double a21 = m * l * c, a22 = ia;
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-12) {
    throw DegenerateConfigurationError("dynamics: singular mass matrix");
  }
  const double r1 = tau_w / r + m * l * s * state.theta_dot * state.theta_dot;
  const double r2 = -tau_w + tau_d + m * kGravity * l * s;
  const double xdd = (a22 * r1 - a12 * r2) / det;
  const double thdd = (a11 * r2 - a21 * r1) / det;
  return {state.x_dot, xdd, state.theta_dot, thdd};
}

double mechanical_energy(const AggregateBody & body, const WheelParams & wheels,
                         const WipState & state)
{
  const double m = body.mass;
  const double l = body.com_distance;
  const double r = wheels.radius;
  const double mt = m + wheels.mass + wheels.inertia / (r * r);
  const double c = std::cos(state.theta);
  return 0.5 * mt * state.x_dot * state.x_dot + 0.5 * body.axle_inertia * state.theta_dot * state.theta_dot +
         m * l * c * state.x_dot * state.theta_dot + m * kGravity * l * c;
}

Linearization linearize(const AggregateBody & body, const WheelParams & wheels)
{
  const double m = body.mass;
  const double l = body.com_distance;
  const double ia = body.axle_inertia;
  const double r = wheels.radius;
  const double mt = m + wheels.mass + wheels.inertia / (r * r);
  const double det = mt * ia - m * m * l * l;
  if (std::abs(det) < 1e-12) {
    throw DegenerateConfigurationError("linearize: singular mass matrix");
  }
  Linearization lin;
  lin.A.setZero();
  lin.A(0, 1) = 1.0;
  lin.A(2, 3) = 1.0;
  lin.A(1, 2) = -m * m * l * l * kGravity / det;
  lin.A(3, 2) = mt * m * kGravity * l / det;
  lin.b_x = (ia / r + m * l) / det;
  lin.b_theta = -(mt + m * l / r) / det;
  lin.B = {0.0, lin.b_x, 0.0, lin.b_theta};
  return lin;
}

WipState step(const AggregateBody & body, const WheelParams & wheels, const WipState & state,
              double tau_w, double tau_d, double dt)
{
  if (!(dt > 0.0 && dt <= 0.01)) {
    throw InvalidParameterError("step: dt must lie in (0, 0.01]");
  }
  const Eigen::Vector4d y0 = state.vec();
  auto f = [&](const Eigen::Vector4d & y) {
    return dynamics(body, wheels, WipState::from_vec(y), tau_w, tau_d);
  };
  const Eigen::Vector4d k1 = f(y0);
  const Eigen::Vector4d k2 = f(y0 + 0.5 * dt * k1);
  const Eigen::Vector4d k3 = f(y0 + 0.5 * dt * k2);
  const Eigen::Vector4d k4 = f(y0 + dt * k3);
  const Eigen::Vector4d y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!y1.allFinite()) {
    throw SimulationDivergedError("step: non-finite state");
  }
  return WipState::from_vec(y1);
}

}  // namespace wiplab
