#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace latgreen {

// Dense second-order forward-mode jet: carries value, gradient and Hessian of
// an intermediate quantity with respect to the d evaluation variables.  Every
// update adds a symmetric term, so the Hessian is symmetric up to contraction
// rounding; consumers that need it exact symmetrize once at the end.
template <typename Scalar>
class Jet2 {
public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Jet2() : v(Scalar(0)) {}
  Jet2(Scalar value, Vec grad, Mat hess)
      : v(value), g(std::move(grad)), h(std::move(hess)) {}

  static Jet2 constant(Scalar c, Eigen::Index d) {
    return Jet2(c, Vec::Zero(d), Mat::Zero(d, d));
  }
  static Jet2 variable(Scalar c, Eigen::Index d, Eigen::Index i) {
    Jet2 j = constant(c, d);
    j.g(i) = Scalar(1);
    return j;
  }

  Scalar v;
  Vec g;
  Mat h;
};

// f(u) with f', f'' supplied: value/gradient/Hessian chain rule.
template <typename S>
Jet2<S> chain(const Jet2<S>& u, S f, S df, S ddf) {
  return Jet2<S>(f, df * u.g, df * u.h + ddf * (u.g * u.g.transpose()));
}

template <typename S>
Jet2<S> operator+(const Jet2<S>& a, const Jet2<S>& b) {
  return Jet2<S>(a.v + b.v, a.g + b.g, a.h + b.h);
}
template <typename S>
Jet2<S> operator-(const Jet2<S>& a, const Jet2<S>& b) {
  return Jet2<S>(a.v - b.v, a.g - b.g, a.h - b.h);
}
template <typename S>
Jet2<S> operator-(const Jet2<S>& a) {
  return Jet2<S>(-a.v, -a.g, -a.h);
}
template <typename S>
Jet2<S> operator*(const Jet2<S>& a, const Jet2<S>& b) {
  typename Jet2<S>::Mat cross = a.g * b.g.transpose();
  return Jet2<S>(a.v * b.v, a.v * b.g + b.v * a.g,
                 a.v * b.h + b.v * a.h + cross + cross.transpose());
}
template <typename S>
Jet2<S> inverse(const Jet2<S>& a) {
  const S iv = S(1) / a.v;
  return chain(a, iv, -iv * iv, S(2) * iv * iv * iv);
}
template <typename S>
Jet2<S> operator/(const Jet2<S>& a, const Jet2<S>& b) {
  return a * inverse(b);
}

template <typename S>
Jet2<S> sin(const Jet2<S>& u) {
  using std::cos;
  using std::sin;
  const S s = sin(u.v);
  return chain(u, s, cos(u.v), -s);
}
template <typename S>
Jet2<S> cos(const Jet2<S>& u) {
  using std::cos;
  using std::sin;
  const S c = cos(u.v);
  return chain(u, c, -sin(u.v), -c);
}
template <typename S>
Jet2<S> exp(const Jet2<S>& u) {
  using std::exp;
  const S e = exp(u.v);
  return chain(u, e, e, e);
}
template <typename S>
Jet2<S> cosh(const Jet2<S>& u) {
  using std::cosh;
  using std::sinh;
  const S c = cosh(u.v);
  return chain(u, c, sinh(u.v), c);
}
template <typename S>
Jet2<S> sinh(const Jet2<S>& u) {
  using std::cosh;
  using std::sinh;
  const S s = sinh(u.v);
  return chain(u, s, cosh(u.v), s);
}
template <typename S>
Jet2<S> sqrt(const Jet2<S>& u) {
  using std::sqrt;
  const S r = sqrt(u.v);
  return chain(u, r, S(0.5) / r, S(-0.25) / (r * u.v));
}
template <typename S>
Jet2<S> log(const Jet2<S>& u) {
  using std::log;
  const S iv = S(1) / u.v;
  return chain(u, log(u.v), iv, -iv * iv);
}

}  // namespace latgreen
