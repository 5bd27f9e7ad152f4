#pragma once

#include <Eigen/Dense>
#include <vector>

#include "latgreen/geodesics.hpp"
#include "latgreen/model.hpp"

namespace latgreen {

// Linearized flow data along a trajectory: X(0)=0, P(0)=I.
struct JacobiSample {
  double t{0.0};
  Eigen::VectorXd x, p;
  Eigen::MatrixXd X, P;
};

// Integrate the linearized Hamiltonian system jointly with the base
// trajectory (augmented state, shared step control) from the trajectory's
// initial data over [0, tau].
std::vector<JacobiSample> propagate_jacobi(const ModelSpec& m, const Trajectory& traj,
                                           double rtol = 1e-10, double atol = 1e-12);

// det [[0, -v_y^T], [v, X]].
double bordered_det(const Eigen::VectorXd& v_y, const Eigen::VectorXd& v,
                    const Eigen::MatrixXd& X);
double bordered_det(const GeodesicSolution& sol, const Eigen::MatrixXd& X);

/// Finsler exponential: endpoint of the geodesic from y with initial velocity
// w, computed from the arc-length-parametrized Hamiltonian flow.
Eigen::VectorXd exp_map(const ModelSpec& m, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w);

// Modified Gram-Schmidt orthonormalization under the metric G; the column
// `last` is the normalized seed direction, preceding columns come from the
// canonical axes in index order (near-parallel ones skipped).
Eigen::MatrixXd g_orthonormal_frame(const Eigen::MatrixXd& G, const Eigen::VectorXd& seed);

// Columns J_i(r) = r * (exp_y)'(r b_d) b_i, i = 1..d-1, by central finite
// differences of exp_map in the G(y,v_y)-orthonormal frame.
Eigen::MatrixXd expmap_jacobian_fd(const ModelSpec& m, const GeodesicSolution& sol);

struct Dispersal {
  Eigen::MatrixXd jacobi_fields;  // d x (d-1), columns J_i(r)
  Eigen::MatrixXd gram;           // g_x(J_i, J_j)
  double gram_det{0.0};
  double delta{0.0};  // det(gram)^{1/4} / dF^{(d-1)/2}
};

Dispersal dispersal_factor(const ModelSpec& m, const GeodesicSolution& sol);

}  // namespace latgreen
