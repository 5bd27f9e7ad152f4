#pragma once

#include <Eigen/Dense>

#include "latgreen/model.hpp"

namespace latgreen {

// H and its first/second phase-space derivatives at (x,p).
// Hpx(i,j) = d^2 H / dp_i dx_j; the (x,p) block is its transpose.
struct PhaseDerivs {
  double H{0.0};
  Eigen::VectorXd dHdx, dHdp;
  Eigen::MatrixXd Hpp, Hpx, Hxx;
};

// H(x,p) = sum over +/- pairs of 2 V(x,ell) cosh<ell,p> - U(x).  Grouping in
// pairs keeps H even in p bit-for-bit; the subtraction of U is folded so that
// H(x,0) = -dpp(x) holds without cancellation error across the pair sum.
double hamiltonian(const ModelSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& p);

// H and dHdp only (hot path of the geodesic flow).
void hamiltonian_and_grad_p(const ModelSpec& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& p, double& H, Eigen::VectorXd& dHdp);

PhaseDerivs phase_derivs(const ModelSpec& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& p);

// max(1, U(x)): reference scale for zero-level tolerances.
double level_scale(const ModelSpec& m, const Eigen::VectorXd& x);

// Sampled test for x-independence of H (all coefficient fields constant on
// the sampled box up to 1e-12 relative).
bool is_translation_invariant(const ModelSpec& m, int n_samples = 64);

}  // namespace latgreen
