#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace latgreen {

// Spherical chart: d-1 angles to a unit vector of R^d.
inline Eigen::VectorXd angles_to_direction(const Eigen::VectorXd& theta, int d) {
  Eigen::VectorXd u(d);
  double s = 1.0;
  for (int i = 0; i < d - 1; ++i) {
    u(i) = s * std::cos(theta(i));
    s *= std::sin(theta(i));
  }
  u(d - 1) = s;
  return u;
}

inline Eigen::VectorXd direction_to_angles(const Eigen::VectorXd& u) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd theta(d - 1);
  double tail = u(d - 1) * u(d - 1);
  for (int i = d - 2; i >= 0; --i) {
    theta(i) = std::atan2(std::sqrt(tail), u(i));
    tail += u(i) * u(i);
  }
  // Keep the last angle's sign: the chart uses sin(theta_{d-2}) >= 0 above,
  // so fold the sign of the final component into the last angle.
  if (d >= 2 && u(d - 1) < 0.0) theta(d - 2) = -theta(d - 2);
  return theta;
}

}  // namespace latgreen
