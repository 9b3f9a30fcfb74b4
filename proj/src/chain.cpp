#include "wiplab/chain.hpp"

#include <cmath>

namespace wiplab
{

void ChainGeometry::validate() const
{
  if (link_count < 1) {
    throw InvalidParameterError("ChainGeometry: link_count must be >= 1");
  }
  if (static_cast<int>(link_lengths.size()) != link_count ||
      static_cast<int>(limit_lo.size()) != link_count ||
      static_cast<int>(limit_hi.size()) != link_count) {
    throw InvalidParameterError("ChainGeometry: per-link arrays must have link_count entries");
  }
  for (int i = 0; i < link_count; ++i) {
    if (!(link_lengths[i] > 0.0)) {
      throw InvalidParameterError("ChainGeometry: link lengths must be strictly positive");
    }
    if (!(limit_lo[i] < limit_hi[i])) {
      throw InvalidParameterError("ChainGeometry: empty joint limit interval");
    }
  }
  if (!(total_mass > 0.0)) {
    throw InvalidParameterError("ChainGeometry: total_mass must be positive");
  }
  if (!(wheel_radius > 0.0) || !(wheel_mass > 0.0) || !(wheel_inertia > 0.0)) {
    throw InvalidParameterError("ChainGeometry: wheel parameters must be positive");
  }
}

bool ChainGeometry::pose_within_limits(const Pose & q) const
{
  if (q.size() != link_count) {
    return false;
  }
  for (int i = 0; i < link_count; ++i) {
    if (q(i) < limit_lo[i] || q(i) > limit_hi[i]) {
      return false;
    }
  }
  return true;
}

ChainGeometry ChainGeometry::default_seven_link()
{
  ChainGeometry g;
  g.link_count = 7;
  g.link_lengths = {0.55, 0.30, 0.30, 0.30, 0.25, 0.25, 0.20};
  g.limit_lo.assign(7, -2.0);
  g.limit_hi.assign(7, 2.0);
  g.limit_lo[0] = -M_PI / 2.0;
  g.limit_hi[0] = M_PI / 2.0;
  g.total_mass = 100.0;
  g.wheel_radius = 0.25;
  g.wheel_mass = 12.0;
  g.wheel_inertia = 0.375;
  return g;
}

std::vector<Eigen::Matrix4d> forward_transforms(const ChainGeometry & geom, const Pose & q)
{
  geom.validate();
  if (q.size() != geom.link_count) {
    throw InvalidParameterError("forward_transforms: pose length does not match link count");
  }
  std::vector<Eigen::Matrix4d> out;
  out.reserve(geom.link_count);
  double theta = 0.0;  // cumulative pitch from vertical
  double ox = 0.0, oz = 0.0;
  for (int i = 0; i < geom.link_count; ++i) {
    theta += q(i);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    // proper rotation with local +x mapping to (sin, 0, cos) AND first row
    // [sin, 0, cos]; the y axis flips, which the planar model never sees
    T(0, 0) = s;
    T(0, 2) = c;
    T(1, 1) = -1.0;
    T(2, 0) = c;
    T(2, 2) = -s;
    T(0, 3) = ox;
    T(2, 3) = oz;
    out.push_back(T);
    ox += geom.link_lengths[i] * s;
    oz += geom.link_lengths[i] * c;
  }
  return out;
}

Eigen::VectorXd feature_vector(const ChainGeometry & geom, const Pose & q)
{
  const auto transforms = forward_transforms(geom, q);
  const int L = geom.link_count;
  Eigen::VectorXd phi(4 * L);
  for (int i = 0; i < L; ++i) {
    phi.segment<4>(4 * i) = transforms[i].row(0).transpose() / geom.total_mass;
  }
  return phi;
}

ComCoordinates com_of(const ChainGeometry & geom, const Pose & q, const Beta & beta)
{
  if (beta.size() != 4 * geom.link_count) {
    throw InvalidParameterError("com_of: beta length must be 4L");
  }
  for (int i = 0; i < geom.link_count; ++i) {
    if (!(beta(4 * i + 3) > 0.0)) {
      throw InvalidParameterError("com_of: nonpositive link mass in beta");
    }
  }
  const auto transforms = forward_transforms(geom, q);
  Eigen::Vector4d acc = Eigen::Vector4d::Zero();
  for (int i = 0; i < geom.link_count; ++i) {
    // beta block is already mass times homogeneous local CoM
    acc += transforms[i] * beta.segment<4>(4 * i);
  }
  acc /= geom.total_mass;
  return ComCoordinates{acc(0), acc(1), acc(2)};
}

double solve_balance_angle(const ChainGeometry & geom, const Pose & locked, const Beta & beta)
{
  Pose q = locked;
  auto xcom_at = [&](double q1) {
    q(0) = q1;
    return com_of(geom, q, beta).x;
  };
  // x_com(q1) = a sin(q1) + b cos(q1) for the planar chain
  const double b = xcom_at(0.0);
  const double a = xcom_at(M_PI / 2.0);
  const double radius = std::hypot(a, b);
  if (radius < 1e-12) {
    throw DegenerateConfigurationError("solve_balance_angle: CoM coincident with wheel axle");
  }
  double root = std::atan2(-b, a);
  // of the two roots, keep the one with the CoM above the axle
  q(0) = root;
  if (com_of(geom, q, beta).z < 0.0) {
    root = (root > 0.0) ? root - M_PI : root + M_PI;
  }
  // bracket and bisect; the closed form is used only as the bracket seed
  double lo = root - 0.1, hi = root + 0.1;
  double flo = xcom_at(lo), fhi = xcom_at(hi);
  if (flo * fhi > 0.0) {
    lo = -M_PI;
    hi = M_PI;
    flo = xcom_at(lo);
    fhi = xcom_at(hi);
    if (flo * fhi > 0.0) {
      throw DegenerateConfigurationError("solve_balance_angle: no sign change in bracket");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = xcom_at(mid);
    if (flo * fmid <= 0.0) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  const double q1 = 0.5 * (lo + hi);
  if (std::abs(xcom_at(q1)) >= 1e-10) {
    throw DegenerateConfigurationError("solve_balance_angle: bisection failed to verify root");
  }
  return q1;
}

}  // namespace wiplab
