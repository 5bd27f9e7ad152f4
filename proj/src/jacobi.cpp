#include "latgreen/jacobi.hpp"

#include <cmath>

#include "latgreen/errors.hpp"
#include "latgreen/finsler.hpp"
#include "latgreen/hamiltonian.hpp"
#include "latgreen/ode.hpp"

namespace latgreen {

std::vector<JacobiSample> propagate_jacobi(const ModelSpec& m, const Trajectory& traj,
                                           double rtol, double atol) {
  if (traj.x.empty()) throw ConfigError("propagate_jacobi: empty trajectory");
  const int d = m.d;
  const int n = 2 * d + 2 * d * d;

  Eigen::VectorXd state = Eigen::VectorXd::Zero(n);
  state.head(d) = traj.x.front();
  state.segment(d, d) = traj.p.front();
  Eigen::Map<Eigen::MatrixXd>(state.data() + 2 * d + d * d, d, d).setIdentity();  // P(0)

  auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    const PhaseDerivs pd = phase_derivs(m, s.head(d), s.segment(d, d));
    const Eigen::Map<const Eigen::MatrixXd> X(s.data() + 2 * d, d, d);
    const Eigen::Map<const Eigen::MatrixXd> P(s.data() + 2 * d + d * d, d, d);
    ds.resize(n);
    ds.head(d) = pd.dHdp;
    ds.segment(d, d) = -pd.dHdx;
    Eigen::Map<Eigen::MatrixXd>(ds.data() + 2 * d, d, d) = pd.Hpx * X + pd.Hpp * P;
    Eigen::Map<Eigen::MatrixXd>(ds.data() + 2 * d + d * d, d, d) =
        -pd.Hxx * X - pd.Hpx.transpose() * P;
  };

  std::vector<JacobiSample> samples;
  auto observer = [&](double t, Eigen::VectorXd& s) -> bool {
    JacobiSample js;
    js.t = t;
    js.x = s.head(d);
    js.p = s.segment(d, d);
    js.X = Eigen::Map<const Eigen::MatrixXd>(s.data() + 2 * d, d, d);
    js.P = Eigen::Map<const Eigen::MatrixXd>(s.data() + 2 * d + d * d, d, d);
    samples.push_back(std::move(js));
    return false;
  };
  integrate_dopri5(rhs, 0.0, traj.tau, state, OdeOptions{rtol, atol, 0.0, 400000},
                   observer);
  return samples;
}

double bordered_det(const Eigen::VectorXd& v_y, const Eigen::VectorXd& v,
                    const Eigen::MatrixXd& X) {
  const int d = static_cast<int>(v.size());
  Eigen::MatrixXd B(d + 1, d + 1);
  B(0, 0) = 0.0;
  B.row(0).tail(d) = -v_y.transpose();
  B.col(0).tail(d) = v;
  B.bottomRightCorner(d, d) = X;
  return B.determinant();
}

double bordered_det(const GeodesicSolution& sol, const Eigen::MatrixXd& X) {
  return bordered_det(sol.v_y, sol.v_x, X);
}

Eigen::VectorXd exp_map(const ModelSpec& m, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w) {
  const int d = m.d;
  const double wn = w.norm();
  if (wn == 0.0) return y;

  const DualPoint dual = dual_point(m, y, w);
  const double r = dual.p.dot(w);  // F(y, w)

  Eigen::VectorXd state(2 * d);
  state.head(d) = y;
  state.tail(d) = dual.p;
  // Arc-length parametrization: dividing the Hamiltonian field by <p, H_p>
  // makes the support integral advance at unit rate, so no event location
  // is needed to stop at distance r.
  auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    const PhaseDerivs pd = phase_derivs(m, s.head(d), s.tail(d));
    const double speed = s.tail(d).dot(pd.dHdp);
    if (speed <= 0.0) throw NumericalError("exp_map: support rate lost positivity");
    ds.resize(2 * d);
    ds.head(d) = pd.dHdp / speed;
    ds.tail(d) = -pd.dHdx / speed;
  };
  integrate_dopri5(rhs, 0.0, r, state, OdeOptions{1e-12, 1e-14, 0.0, 400000});
  return state.head(d);
}

Eigen::MatrixXd g_orthonormal_frame(const Eigen::MatrixXd& G, const Eigen::VectorXd& seed) {
  const int d = static_cast<int>(seed.size());
  const double seed_g = std::sqrt(seed.dot(G * seed));
  if (!(seed_g > 0.0)) throw NumericalError("g_orthonormal_frame: degenerate seed");

  std::vector<Eigen::VectorXd> basis;
  basis.push_back(seed / seed_g);
  for (int axis = 0; axis < d && static_cast<int>(basis.size()) < d; ++axis) {
    Eigen::VectorXd c = Eigen::VectorXd::Unit(d, axis);
    for (const auto& b : basis) c -= b.dot(G * c) * b;
    const double cn = std::sqrt(c.dot(G * c));
    if (cn <= 1e-6) continue;  // near-parallel to the span built so far
    basis.push_back(c / cn);
  }
  if (static_cast<int>(basis.size()) != d)
    throw NumericalError("g_orthonormal_frame: canonical axes did not complete the frame");

  Eigen::MatrixXd frame(d, d);
  for (int i = 1; i < d; ++i) frame.col(i - 1) = basis[i];
  frame.col(d - 1) = basis[0];  // seed direction last
  return frame;
}

Eigen::MatrixXd expmap_jacobian_fd(const ModelSpec& m, const GeodesicSolution& sol) {
  const int d = m.d;
  const FinslerTensor ft = finsler_tensor(m, sol.y, sol.v_y);
  const Eigen::MatrixXd frame = g_orthonormal_frame(ft.G, sol.v_y);

  const double r = sol.dF;
  const Eigen::VectorXd w0 = r * frame.col(d - 1);  // F(y, w0) = r

  const Eigen::VectorXd reach = exp_map(m, sol.y, w0);
  if ((reach - sol.x).norm() > 1e-8 * (1.0 + (sol.x - sol.y).norm()))
    throw NumericalError("expmap_jacobian_fd: exponential misses the far endpoint");

  const double eps = 1e-4 * w0.norm();
  Eigen::MatrixXd J(d, d - 1);
  for (int i = 0; i < d - 1; ++i) {
    const Eigen::VectorXd ep = exp_map(m, sol.y, w0 + eps * frame.col(i));
    const Eigen::VectorXd em = exp_map(m, sol.y, w0 - eps * frame.col(i));
    J.col(i) = r * (ep - em) / (2.0 * eps);
  }
  return J;
}

Dispersal dispersal_factor(const ModelSpec& m, const GeodesicSolution& sol) {
  const int d = m.d;
  Dispersal out;
  out.jacobi_fields = expmap_jacobian_fd(m, sol);

  const FinslerTensor ft_x = finsler_tensor(m, sol.x, sol.v_x);
  out.gram.resize(d - 1, d - 1);
  for (int i = 0; i < d - 1; ++i)
    for (int j = 0; j < d - 1; ++j)
      out.gram(i, j) = out.jacobi_fields.col(i).dot(ft_x.G * out.jacobi_fields.col(j));
  out.gram_det = (d == 1) ? 1.0 : out.gram.determinant();
  if (!(out.gram_det > 0.0))
    throw GeometryError("dispersal_factor: Jacobi fields are degenerate at the endpoint");
  out.delta = std::pow(out.gram_det, 0.25) / std::pow(sol.dF, 0.5 * (d - 1));
  return out;
}

}  // namespace latgreen
