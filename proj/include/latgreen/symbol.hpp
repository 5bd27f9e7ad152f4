#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "latgreen/model.hpp"

namespace latgreen {

// Finitely supported function on the integer lattice.
struct LatticeFunction {
  std::vector<std::pair<Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>, double>> values;
};

// Trigonometric symbol at complexified frequency: V~(x, xi + i p) =
// sum_ell V(x,ell) { cosh<ell,p> cos<ell,xi> - i sinh<ell,p> sin<ell,xi> }.
std::complex<double> v_tilde(const ModelSpec& m, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& xi, const Eigen::VectorXd& p);

// Conjugated principal symbol for a linear weight with gradient phigrad:
// a(x,xi) = i V~(x, xi + i phigrad) - i U(x).
std::complex<double> principal_symbol_a(const ModelSpec& m, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& xi,
                                        const Eigen::VectorXd& phigrad);

// Fourier coefficient (2pi)^-d int exp(-i<k,xi>) [U_h(x) - V~(x,xi)] dxi by
// tensor trapezoid quadrature; exact (to rounding) once nodes_per_dim exceeds
// R + |k|_inf.
double symbol_fourier_coefficient(const ModelSpec& m, const Eigen::VectorXd& x,
                                  double h, const Eigen::VectorXi& k,
                                  int nodes_per_dim);

// |matrix action - midpoint-quantized Fourier-coefficient action| at site x
// for a finitely supported test function: the two routes to E''(0) f(x).
double verify_matrix_symbol_identity(const ModelSpec& m, double h,
                                     const LatticeSite& x, const LatticeFunction& f,
                                     int nodes_per_dim = 0);

}  // namespace latgreen
