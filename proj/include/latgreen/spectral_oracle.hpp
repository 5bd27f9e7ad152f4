#pragma once

#include <Eigen/Dense>

#include "latgreen/model.hpp"

namespace latgreen {

struct SpectralValue {
  double value{0.0};
  double imag_residual{0.0};  // |Im| / |Re| of the quadrature sum
  double denom_margin{0.0};   // min Re(U - Vtilde) over the grid
  int n{0};                   // nodes per dimension
};

// Torus-quadrature Green value for a translation-invariant model: trapezoid
// sum of exp(i<xi, z/h>) / (U - Vtilde(xi + i pbar)) on an n^d grid, with the
// analytic contour shift pbar strictly inside the polar body.
SpectralValue green_spectral(const ModelSpec& m, const Eigen::VectorXd& z, double h,
                             const Eigen::VectorXd& pbar, int n);

// Double n until two successive values agree to relative 1e-12; returns the
// converged n.  Caps at 4096 nodes per dimension (512 for d = 3).
int quadrature_refine(const ModelSpec& m, const Eigen::VectorXd& z, double h,
                      const Eigen::VectorXd& pbar, int n0 = 16);

// Default contour shift: 0.9 * dual momentum of the displacement direction.
Eigen::VectorXd spectral_tilt(const ModelSpec& m, const Eigen::VectorXd& z);

// Default tilt + refinement, value only.
double green_spectral_auto(const ModelSpec& m, const Eigen::VectorXd& z, double h);

}  // namespace latgreen
