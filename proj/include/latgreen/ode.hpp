#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "latgreen/errors.hpp"

namespace latgreen {

struct OdeOptions {
  double rtol{1e-10};
  double atol{1e-12};
  double h_init{0.0};  // 0: estimate from the first derivative
  long max_steps{400000};
};

// Dormand-Prince 5(4) embedded pair with FSAL and standard step control.
// Observer is invoked at t0 and after every accepted step; it may mutate the
// state (e.g. project back onto an invariant manifold) and must then return
// true so the FSAL derivative is refreshed.
template <typename Rhs>
void integrate_dopri5(Rhs&& f, double t0, double t1, Eigen::VectorXd& y,
                      const OdeOptions& opt,
                      const std::function<bool(double, Eigen::VectorXd&)>& observer = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span == 0.0) {
    if (observer) observer(t0, y);
    return;
  }
  const double dir = span > 0 ? 1.0 : -1.0;
  const Eigen::Index n = y.size();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  double t = t0;
  f(t, y, k1);
  if (observer && observer(t, y)) f(t, y, k1);

  double h = opt.h_init;
  if (h == 0.0) {
    const double d0 = y.norm(), d1 = k1.norm();
    h = (d1 > 1e-10) ? 0.01 * std::max(1e-6, d0 / d1) : 1e-6;
    h = std::min(h, std::abs(span));
  }
  h *= dir;

  for (long step = 0; step < opt.max_steps; ++step) {
    if ((t - t1) * dir >= 0.0) return;
    if ((t + h - t1) * dir > 0.0) h = t1 - t;
    if (std::abs(h) < 1e-14 * std::abs(span))
      throw NumericalError("ode: step size collapse at t = " + std::to_string(t));

    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      const double q = err(i) / sc;
      sum += q * q;
    }
    const double enorm = std::sqrt(sum / static_cast<double>(n));

    if (enorm <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      if (observer && observer(t, y)) f(t, y, k1);
    }
    const double factor =
        (enorm == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
    h *= factor;
  }
  throw NumericalError("ode: max step count exceeded");
}

}  // namespace latgreen
