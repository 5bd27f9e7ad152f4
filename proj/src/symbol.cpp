#include "latgreen/symbol.hpp"

#include <cmath>
#include <numbers>

namespace latgreen {

std::complex<double> v_tilde(const ModelSpec& m, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& xi, const Eigen::VectorXd& p) {
  double re = 0.0, im = 0.0;
  for (const auto& pf : m.pairs) {
    const Eigen::VectorXd ell = pf.offset.cast<double>();
    const double v = m.J * eval_value(pf.field, x);
    const double tp = p.dot(ell);
    const double tx = xi.dot(ell);
    re += 2.0 * v * std::cosh(tp) * std::cos(tx);
    im -= 2.0 * v * std::sinh(tp) * std::sin(tx);
  }
  return {re, im};
}

std::complex<double> principal_symbol_a(const ModelSpec& m, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& xi,
                                        const Eigen::VectorXd& phigrad) {
  const std::complex<double> i(0.0, 1.0);
  return i * v_tilde(m, x, xi, phigrad) - i * onsite_u(m, x);
}

double symbol_fourier_coefficient(const ModelSpec& m, const Eigen::VectorXd& x,
                                  double h, const Eigen::VectorXi& k,
                                  int nodes_per_dim) {
  const int d = m.d;
  const int n = nodes_per_dim;
  const double uh = onsite_uh(m, x, h);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);

  Eigen::VectorXi idx = Eigen::VectorXi::Zero(d);
  Eigen::VectorXd xi(d);
  double acc = 0.0;
  const double step = 2.0 * std::numbers::pi / n;
  for (;;) {
    for (int j = 0; j < d; ++j) xi(j) = step * idx(j);
    const double a = uh - v_tilde(m, x, xi, zero).real();
    acc += std::cos(k.cast<double>().dot(xi)) * a;
    int axis = 0;
    while (axis < d && ++idx(axis) == n) idx(axis++) = 0;
    if (axis == d) break;
  }
  return acc / std::pow(static_cast<double>(n), d);
}

double verify_matrix_symbol_identity(const ModelSpec& m, double h,
                                     const LatticeSite& x, const LatticeFunction& f,
                                     int nodes_per_dim) {
  int kmax = 0;
  for (const auto& [ky, val] : f.values) {
    (void)val;
    kmax = std::max<int>(
        kmax, static_cast<int>((ky - x.k).lpNorm<Eigen::Infinity>()));
  }
  const int n = nodes_per_dim > 0 ? nodes_per_dim : 2 * (m.R + kmax) + 3;

  double lhs = 0.0, rhs = 0.0;
  for (const auto& [ky, val] : f.values) {
    LatticeSite y;
    y.k = ky;
    y.h = h;
    lhs += matrix_entry(m, x, y) * val;
    const Eigen::VectorXd mid = 0.5 * (x.physical() + y.physical());
    const Eigen::VectorXi k = (ky - x.k).cast<int>();
    rhs += symbol_fourier_coefficient(m, mid, h, k, n) * val;
  }
  return std::abs(lhs - rhs);
}

}  // namespace latgreen
