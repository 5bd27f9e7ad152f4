#include <cmath>
#include <numbers>

#include "doctest.h"
#include "latgreen/finsler.hpp"
#include "latgreen/sampling.hpp"
#include "test_models.hpp"

using namespace latgreen;

namespace {

Eigen::VectorXd direction(int i) {
  const double th = 2.0 * std::numbers::pi * halton(static_cast<std::uint64_t>(i), 2);
  return vec2(std::cos(th), std::sin(th));
}

Eigen::VectorXd base_point(int i) {
  return (6.0 * halton_point(static_cast<std::uint64_t>(i) + 17, 2).array() - 3.0)
      .matrix();
}

}  // namespace

TEST_CASE("figuratrix radius reproduces the closed form of the uniform model") {
  const ModelSpec m = model_a();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  // 0.8 cosh r + 0.8 - 2.6 = 0 along an axis
  CHECK(figuratrix_radius(m, zero, vec2(1, 0)) ==
        doctest::Approx(kAxisRadiusA).epsilon(1e-12));
  CHECK(figuratrix_radius(m, zero, vec2(0, -1)) ==
        doctest::Approx(kAxisRadiusA).epsilon(1e-12));
  // 1.6 cosh(r/sqrt 2) - 2.6 = 0 on the diagonal
  const double rd = std::sqrt(2.0) * std::acosh(1.625);
  CHECK(figuratrix_radius(m, zero, vec2(1, 1) / std::sqrt(2.0)) ==
        doctest::Approx(rd).epsilon(1e-12));
}

TEST_CASE("dual point solves the alignment system") {
  for (const ModelSpec& m : {model_a(), model_b()}) {
    for (int i = 0; i < 25; ++i) {
      const Eigen::VectorXd x = base_point(i);
      const Eigen::VectorXd v = direction(i);
      const DualPoint dp = dual_point(m, x, v);
      CHECK(dp.lambda > 0.0);
      CHECK(std::abs(hamiltonian(m, x, dp.p)) <= 1e-11 * level_scale(m, x));
      const Eigen::VectorXd n = phase_derivs(m, x, dp.p).dHdp;
      CHECK((n - dp.lambda * v).norm() <= 1e-10 * n.norm());
    }
  }
}

TEST_CASE("the norm is positively homogeneous and even") {
  const ModelSpec m = model_b();
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = base_point(i);
    const Eigen::VectorXd v = direction(i);
    const double f = finsler_norm(m, x, v);
    CHECK(f > 0.0);
    CHECK(finsler_norm(m, x, 0.5 * v) == doctest::Approx(0.5 * f).epsilon(1e-11));
    CHECK(finsler_norm(m, x, 3.0 * v) == doctest::Approx(3.0 * f).epsilon(1e-11));
    CHECK(finsler_norm(m, x, -v) == doctest::Approx(f).epsilon(1e-11));
    CHECK(finsler_norm(m, x, -2.0 * v) == doctest::Approx(2.0 * f).epsilon(1e-11));
  }
}

TEST_CASE("triangle inequality on sampled pairs") {
  const ModelSpec m = model_b();
  for (int i = 0; i < 40; ++i) {
    const Eigen::VectorXd x = base_point(i);
    const Eigen::VectorXd v = direction(2 * i);
    const Eigen::VectorXd w = direction(2 * i + 1);
    if ((v + w).norm() < 1e-8) continue;
    const double lhs = finsler_norm(m, x, v + w);
    const double rhs = finsler_norm(m, x, v) + finsler_norm(m, x, w);
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("fundamental tensor: support identity, kernel, positivity") {
  for (const ModelSpec& m : {model_a(), model_b()}) {
    for (int i = 0; i < 15; ++i) {
      const Eigen::VectorXd x = base_point(i);
      const Eigen::VectorXd v = 1.7 * direction(i + 3);
      const FinslerTensor t = finsler_tensor(m, x, v);
      const DualPoint dp = dual_point(m, x, v);
      CHECK(t.F == doctest::Approx(dp.p.dot(v)).epsilon(1e-12));
      CHECK((t.Fv - dp.p).norm() <= 1e-9 * dp.p.norm());
      CHECK((t.Fvv * v).norm() <= 1e-8 * t.Fvv.norm() * v.norm());
      CHECK(v.dot(t.G * v) == doctest::Approx(t.F * t.F).epsilon(1e-10));
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.G);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      CHECK((t.G - (t.F * t.Fvv + t.Fv * t.Fv.transpose())).norm() <=
            1e-12 * t.G.norm());
    }
  }
}

TEST_CASE("determinant identities hold to tight residuals on random samples") {
  for (const ModelSpec& m : {model_a(), model_b()}) {
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd x = base_point(i);
      const Eigen::VectorXd v = direction(i + 11);
      const AppendixBResiduals r = verify_appendix_b(m, x, v);
      CHECK(r.maria1 <= 1e-7);
      CHECK(r.maria2 <= 1e-7);
    }
  }
}

TEST_CASE("projected momentum Hessian has full reduced rank") {
  const ModelSpec m = model_a();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const DualPoint dp = dual_point(m, zero, vec2(1, 0));
  const Eigen::MatrixXd hp = hpp_perp(m, zero, dp.p);
  REQUIRE(hp.rows() == 1);
  REQUIRE(hp.cols() == 1);
  // Hpp = diag(0.8 cosh r, 0.8); the complement of grad_p H = (|v|,0) is e2
  CHECK(hp(0, 0) == doctest::Approx(0.8).epsilon(1e-10));
}
