#include <cmath>

#include "doctest.h"
#include "latgreen/finsler.hpp"
#include "latgreen/geodesics.hpp"
#include "latgreen/hamiltonian.hpp"
#include "latgreen/jacobi.hpp"
#include "test_models.hpp"

using namespace latgreen;

namespace {

// Fixed-step RK4 for the raw Hamiltonian system; no level-set guard, so it
// can flow the off-level momenta needed for finite-difference derivatives.
void rk4_flow(const ModelSpec& m, Eigen::VectorXd& x, Eigen::VectorXd& p, double tau,
              int steps) {
  const double dt = tau / steps;
  auto rhs = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& pp,
                 Eigen::VectorXd& dx, Eigen::VectorXd& dp) {
    const PhaseDerivs d = phase_derivs(m, xx, pp);
    dx = d.dHdp;
    dp = -d.dHdx;
  };
  Eigen::VectorXd k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
  for (int i = 0; i < steps; ++i) {
    rhs(x, p, k1x, k1p);
    rhs(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, k2x, k2p);
    rhs(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, k3x, k3p);
    rhs(x + dt * k3x, p + dt * k3p, k4x, k4p);
    x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    p += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
  }
}

}  // namespace

TEST_CASE("linearized flow of the uniform model is t times the momentum Hessian") {
  const ModelSpec m = model_a();
  const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(1, 0));
  const auto samples = propagate_jacobi(m, sol.traj);
  REQUIRE(samples.size() >= 2);
  const Eigen::MatrixXd hpp = phase_derivs(m, sol.y, sol.p_y).Hpp;
  for (const JacobiSample& s : samples) {
    CHECK((s.X - s.t * hpp).norm() <= 1e-8 * (1.0 + s.t * hpp.norm()));
    CHECK((s.P - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-9);
  }
}

TEST_CASE("the linearized flow is symplectic along both reference models") {
  for (const ModelSpec& m : {model_a(), model_b()}) {
    const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(2, 1));
    const auto samples = propagate_jacobi(m, sol.traj);
    REQUIRE(!samples.empty());
    for (const JacobiSample& s : samples) {
      CHECK((s.X.transpose() * s.P - s.P.transpose() * s.X).norm() <= 1e-9);
    }
  }
}

TEST_CASE("variational equation matches finite differences of an independent flow") {
  const ModelSpec m = model_b();
  const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(1, 0));
  const auto samples = propagate_jacobi(m, sol.traj);
  const Eigen::MatrixXd X = samples.back().X;
  const Eigen::MatrixXd P = samples.back().P;

  const double eps = 1e-6;
  const int steps = 1500;
  Eigen::MatrixXd Xfd(2, 2), Pfd(2, 2);
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd xp = sol.y, pp = sol.p_y, xm = sol.y, pm = sol.p_y;
    pp(i) += eps;
    pm(i) -= eps;
    rk4_flow(m, xp, pp, sol.tau, steps);
    rk4_flow(m, xm, pm, sol.tau, steps);
    Xfd.col(i) = (xp - xm) / (2 * eps);
    Pfd.col(i) = (pp - pm) / (2 * eps);
  }
  CHECK((X - Xfd).norm() <= 1e-4 * Xfd.norm());
  CHECK((P - Pfd).norm() <= 1e-4 * Pfd.norm());

  // cross-check the base flight itself
  Eigen::VectorXd xe = sol.y, pe = sol.p_y;
  rk4_flow(m, xe, pe, sol.tau, steps);
  CHECK((xe - sol.x).norm() <= 1e-8);
}

TEST_CASE("bordered determinant growth of the uniform model") {
  const ModelSpec m = model_a();
  const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(1, 0));
  const auto samples = propagate_jacobi(m, sol.traj);
  for (const JacobiSample& s : samples) {
    // det [[0,-v^T],[v, t Hpp]] = 0.8 t |v|^2 with |v|^2 = 2.6
    const double expected = 0.8 * 2.6 * s.t;
    CHECK(bordered_det(sol.v_y, sol.v_y, s.X) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
  const double at_tau = bordered_det(sol, samples.back().X);
  CHECK(at_tau == doctest::Approx(1.2899612397277682).epsilon(1e-8));
}

TEST_CASE("exponential map is a translation in flat geometry") {
  const ModelSpec m = model_a();
  const Eigen::VectorXd y = vec2(0.25, -0.5);
  for (const Eigen::VectorXd& w :
       {vec2(1, 0), vec2(0.3, 0.4), vec2(-2, 1.5), vec2(0, 0)}) {
    CHECK((exp_map(m, y, w) - (y + w)).norm() <= 1e-9 * (1.0 + w.norm()));
  }
}

TEST_CASE("exponential map inverts the two-point solution") {
  const ModelSpec m = model_b();
  const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(1, 0));
  const double f0 = finsler_norm(m, sol.y, sol.v_y);
  const Eigen::VectorXd w = sol.v_y * (sol.dF / f0);
  CHECK((exp_map(m, sol.y, w) - sol.x).norm() <= 1e-8);
}

TEST_CASE("frames are orthonormal under the fundamental tensor") {
  const ModelSpec m = model_b();
  const Eigen::VectorXd x = vec2(0.3, -0.9);
  const Eigen::VectorXd v = vec2(0.8, 0.6);
  const Eigen::MatrixXd G = finsler_tensor(m, x, v).G;
  const Eigen::MatrixXd frame = g_orthonormal_frame(G, v);
  CHECK((frame.transpose() * G * frame - Eigen::MatrixXd::Identity(2, 2)).norm() <=
        1e-12);
  // the seed direction sits in the last column
  const Eigen::VectorXd last = frame.col(1);
  CHECK((last / last.norm() - v / v.norm()).norm() <= 1e-12);
}

TEST_CASE("dispersal is the identity factor in flat geometry") {
  const ModelSpec m = model_a();
  const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(1, 0));
  const Dispersal disp = dispersal_factor(m, sol);
  CHECK(std::abs(disp.delta - 1.0) <= 1e-9);
  REQUIRE(disp.gram.rows() == 1);
  // J_1(r) = r b_1, so the Gram matrix is r^2 in the G-orthonormal frame
  CHECK(disp.gram(0, 0) ==
        doctest::Approx(kAxisRadiusA * kAxisRadiusA).epsilon(1e-6));
  CHECK(disp.gram_det > 0.0);
}
