#pragma once

#include <Eigen/Dense>

#include "latgreen/hamiltonian.hpp"
#include "latgreen/model.hpp"

namespace latgreen {

// Point p on the figuratrix {H(x,.)=0} whose outward normal grad_p H is the
// positive multiple lambda of the query direction v.
struct DualPoint {
  Eigen::VectorXd p;
  double lambda{0.0};
};

struct FinslerTensor {
  double F{0.0};
  Eigen::VectorXd Fv;   // = p(x,v)
  Eigen::MatrixXd Fvv;  // velocity Hessian of F, Fvv*v = 0
  Eigen::MatrixXd G;    // F*Fvv + Fv*Fv^T, positive definite
};

struct AppendixBResiduals {
  double maria1{0.0};  // inverse projected-Hessian determinant identity
  double maria2{0.0};  // bordered-determinant vs det G identity
};

// Unique r > 0 with H(x, r*u) = 0 along a unit momentum direction u;
// bracketing plus safeguarded Newton.
double figuratrix_radius(const ModelSpec& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u);

// Solve grad_p H(x,p) = lambda*v, H(x,p) = 0 for (p, lambda) by damped Newton
// seeded from the figuratrix point in direction v.
DualPoint dual_point(const ModelSpec& m, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& v);

// F(x,v) = <p(x,v), v>.
double finsler_norm(const ModelSpec& m, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& v);

// F, Fv, Fvv (implicit differentiation of the dual-point system) and G.
FinslerTensor finsler_tensor(const ModelSpec& m, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v);

// Hessian of H in p restricted to the orthogonal complement of grad_p H,
// in an orthonormal basis of that complement.
Eigen::MatrixXd hpp_perp(const ModelSpec& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& p);

// Relative residuals of the two determinant identities linking Fvv, G and
// the projected Hessian of H; both sides evaluated independently.
AppendixBResiduals verify_appendix_b(const ModelSpec& m, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v);

}  // namespace latgreen
