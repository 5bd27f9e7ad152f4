#include "latgreen/finsler.hpp"

#include <cmath>

#include "latgreen/errors.hpp"

namespace latgreen {
namespace {

struct DualResidual {
  Eigen::VectorXd momentum;  // grad_p H - lambda*v
  double level{0.0};         // H

  double norm(double scale) const {
    return std::max(momentum.lpNorm<Eigen::Infinity>(), std::abs(level) / scale);
  }
};

DualResidual dual_residual(const ModelSpec& m, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& p, double lambda,
                           const Eigen::VectorXd& v) {
  DualResidual r;
  double H;
  Eigen::VectorXd dHdp;
  hamiltonian_and_grad_p(m, x, p, H, dHdp);
  r.momentum = dHdp - lambda * v;
  r.level = H;
  return r;
}

}  // namespace

double figuratrix_radius(const ModelSpec& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u) {
  const double scale = level_scale(m, x);
  const double tol = 1e-13 * scale;
  auto g = [&](double r) { return hamiltonian(m, x, r * u); };

  if (!(g(0.0) < 0.0))
    throw HypothesisError("figuratrix_radius: H(x,0) >= 0, polar body degenerate");

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200)
      throw NumericalError("figuratrix_radius: H not coercive along direction");
  }

  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double H;
    Eigen::VectorXd dHdp;
    hamiltonian_and_grad_p(m, x, r * u, H, dHdp);
    if (std::abs(H) <= tol) return r;
    if (H > 0.0)
      hi = r;
    else
      lo = r;
    const double slope = dHdp.dot(u);
    double next = (slope > 0.0) ? r - H / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  throw NumericalError("figuratrix_radius: Newton failed to converge");
}

DualPoint dual_point(const ModelSpec& m, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& v) {
  if (v.size() != m.d || v.norm() == 0.0)
    throw ConfigError("dual_point: v must be a nonzero d-vector");
  const double scale = level_scale(m, x);
  const double tol = 1e-13;

  auto solve_from = [&](const Eigen::VectorXd& u0) -> DualPoint {
    const double r0 = figuratrix_radius(m, x, u0);
    Eigen::VectorXd p = r0 * u0;
    double H;
    Eigen::VectorXd dHdp;
    hamiltonian_and_grad_p(m, x, p, H, dHdp);
    double lambda = dHdp.dot(v) / v.squaredNorm();

    DualResidual res = dual_residual(m, x, p, lambda, v);
    for (int it = 0; it < 50; ++it) {
      if (res.norm(scale) <= tol && std::abs(res.level) <= 1e-12 * scale) {
        if (!(lambda > 0.0) || !(p.dot(v) > 0.0))
          throw NumericalError("dual_point: converged to non-supporting point");
        return DualPoint{p, lambda};
      }
      const PhaseDerivs pd = phase_derivs(m, x, p);
      Eigen::MatrixXd A(m.d + 1, m.d + 1);
      A.topLeftCorner(m.d, m.d) = pd.Hpp;
      A.topRightCorner(m.d, 1) = -v;
      A.bottomLeftCorner(1, m.d) = pd.dHdp.transpose();
      A(m.d, m.d) = 0.0;
      Eigen::VectorXd rhs(m.d + 1);
      rhs.head(m.d) = -res.momentum;
      rhs(m.d) = -res.level;
      const Eigen::VectorXd step = A.partialPivLu().solve(rhs);

      double s = 1.0;
      const double base = res.norm(scale);
      for (int halving = 0; halving < 40; ++halving) {
        const Eigen::VectorXd p_try = p + s * step.head(m.d);
        const double lambda_try = lambda + s * step(m.d);
        const DualResidual res_try = dual_residual(m, x, p_try, lambda_try, v);
        if (res_try.norm(scale) < (1.0 - 1e-4 * s) * base || halving == 39) {
          p = p_try;
          lambda = lambda_try;
          res = res_try;
          break;
        }
        s *= 0.5;
      }
    }
    throw NumericalError("dual_point: Newton did not converge");
  };

  const Eigen::VectorXd u = v.normalized();
  try {
    return solve_from(u);
  } catch (const NumericalError&) {
    for (int i = 0; i < 2 * m.d; ++i) {
      Eigen::VectorXd u_try = u;
      u_try(i % m.d) += (i < m.d ? 0.05 : -0.05);
      u_try.normalize();
      try {
        return solve_from(u_try);
      } catch (const NumericalError&) {
      }
    }
    throw NumericalError("dual_point: Newton diverged from all restart seeds (ill-conditioned dual problem)");
  }
}

double finsler_norm(const ModelSpec& m, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& v) {
  return dual_point(m, x, v).p.dot(v);
}

FinslerTensor finsler_tensor(const ModelSpec& m, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v) {
  const DualPoint dp = dual_point(m, x, v);
  FinslerTensor t;
  t.Fv = dp.p;
  t.F = dp.p.dot(v);

  // Differentiate {grad_p H(p(v)) = lambda(v) v, H(p(v)) = 0} in v:
  // [Hpp, -v; grad_p H^T, 0] * [dp/dv_j; dlambda/dv_j] = [lambda e_j; 0].
  const PhaseDerivs pd = phase_derivs(m, x, dp.p);
  Eigen::MatrixXd A(m.d + 1, m.d + 1);
  A.topLeftCorner(m.d, m.d) = pd.Hpp;
  A.topRightCorner(m.d, 1) = -v;
  A.bottomLeftCorner(1, m.d) = pd.dHdp.transpose();
  A(m.d, m.d) = 0.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (lu.determinant() == 0.0)
    throw NumericalError("finsler_tensor: singular implicit-function Jacobian");

  t.Fvv.resize(m.d, m.d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.d + 1);
  for (int j = 0; j < m.d; ++j) {
    rhs.setZero();
    rhs(j) = dp.lambda;
    const Eigen::VectorXd sol = lu.solve(rhs);
    t.Fvv.col(j) = sol.head(m.d);
  }
  t.Fvv = 0.5 * (t.Fvv + t.Fvv.transpose()).eval();
  t.G = t.F * t.Fvv + t.Fv * t.Fv.transpose();
  return t;
}

Eigen::MatrixXd hpp_perp(const ModelSpec& m, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& p) {
  const PhaseDerivs pd = phase_derivs(m, x, p);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(pd.dHdp);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m.d, m.d);
  const Eigen::MatrixXd basis = Q.rightCols(m.d - 1);
  return basis.transpose() * pd.Hpp * basis;
}

AppendixBResiduals verify_appendix_b(const ModelSpec& m, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) {
  const FinslerTensor t = finsler_tensor(m, x, v);
  const int d = m.d;

  Eigen::MatrixXd B(d + 1, d + 1);
  B(0, 0) = 0.0;
  B.block(0, 1, 1, d) = v.transpose();
  B.block(1, 0, d, 1) = v;
  B.block(1, 1, d, d) = t.Fvv;
  const double det_bordered = B.determinant();

  AppendixBResiduals out;
  const double vn = v.norm();

  const double rhs2 = -t.G.determinant() * std::pow(vn, 4) / std::pow(t.F, d + 1);
  out.maria2 = std::abs(det_bordered - rhs2) /
               std::max({std::abs(det_bordered), std::abs(rhs2), 1e-300});

  const DualPoint dp = dual_point(m, x, v);
  double H;
  Eigen::VectorXd dHdp;
  hamiltonian_and_grad_p(m, x, dp.p, H, dHdp);
  const double lhs1 = 1.0 / hpp_perp(m, x, dp.p).determinant();
  const double rhs1 =
      -std::pow(vn, d - 3) / std::pow(dHdp.norm(), d - 1) * det_bordered;
  out.maria1 = std::abs(lhs1 - rhs1) / std::max({std::abs(lhs1), std::abs(rhs1), 1e-300});
  return out;
}

}  // namespace latgreen
