#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace tbsa {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

using Vec2 = Vec2T<double>;

// Planar cross product (z component).
template <typename Derived1, typename Derived2>
auto cross2(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// w x r for a scalar angular velocity w.
template <typename Scalar, typename Derived>
Vec2T<Scalar> angular_cross(Scalar w, const Eigen::MatrixBase<Derived>& r) {
  return Vec2T<Scalar>(-w * r.y(), w * r.x());
}

template <typename Scalar>
Vec2T<Scalar> rotate(const Vec2T<Scalar>& v, Scalar angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(angle);
  const Scalar s = sin(angle);
  return Vec2T<Scalar>(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

// Force and torque acting on one rigid body.
struct Wrench {
  Vec2 force = Vec2::Zero();
  double torque = 0.0;

  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
};

}  // namespace tbsa
