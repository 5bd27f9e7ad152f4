#include <cmath>
#include <complex>

#include "doctest.h"
#include "latgreen/hamiltonian.hpp"
#include "latgreen/sampling.hpp"
#include "latgreen/symbol.hpp"
#include "test_models.hpp"

using namespace latgreen;

TEST_CASE("fourier coefficients of the symbol recover the coupling data") {
  const ModelSpec m = model_b();
  const Eigen::VectorXd x = vec2(0.4, -1.1);
  const double h = 0.25;
  const int nodes = 8;
  Eigen::VectorXi k(2);

  k << 0, 0;
  CHECK(symbol_fourier_coefficient(m, x, h, k, nodes) ==
        doctest::Approx(onsite_uh(m, x, h)).epsilon(1e-13));

  for (const Offset& ell : all_offsets(2, 1)) {
    k = ell;
    CHECK(symbol_fourier_coefficient(m, x, h, k, nodes) ==
          doctest::Approx(-pair_v(m, x, ell)).epsilon(1e-13));
  }

  k << 2, 1;
  CHECK(std::abs(symbol_fourier_coefficient(m, x, h, k, nodes)) <= 1e-14);
}

TEST_CASE("complexified symbol is real at real frequencies") {
  const ModelSpec m = model_b();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = (4.0 * halton_point(i, 2).array() - 2.0).matrix();
    const Eigen::VectorXd xi =
        (6.0 * halton_point(i + 31, 2).array() - 3.0).matrix();
    const std::complex<double> v = v_tilde(m, x, xi, zero);
    CHECK(std::abs(v.imag()) <= 1e-15 * (1.0 + std::abs(v.real())));
  }
}

TEST_CASE("complexified symbol interpolates the momentum hamiltonian") {
  // V~(x, 0 + i p) = sum 2 V cosh<ell,p> = H(x,p) + U(x)
  const ModelSpec m = model_b();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = (4.0 * halton_point(i, 2).array() - 2.0).matrix();
    const Eigen::VectorXd p = (2.0 * halton_point(i + 57, 2).array() - 1.0).matrix();
    const std::complex<double> v = v_tilde(m, x, zero, p);
    CHECK(v.real() == doctest::Approx(hamiltonian(m, x, p) + onsite_u(m, x))
                          .epsilon(1e-13));
    CHECK(std::abs(v.imag()) <= 1e-14 * (1.0 + std::abs(v.real())));
  }
}

TEST_CASE("principal symbol at zero weight gradient") {
  const ModelSpec m = model_a();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd xi = vec2(0.7, -0.4);
  const std::complex<double> a = principal_symbol_a(m, zero, xi, zero);
  const std::complex<double> expected =
      std::complex<double>(0, 1) * (v_tilde(m, zero, xi, zero) - onsite_u(m, zero));
  CHECK(std::abs(a - expected) <= 1e-14 * (1.0 + std::abs(expected)));
}

TEST_CASE("matrix action equals the quantized symbol action on random patches") {
  for (const ModelSpec& m : {model_a(), model_b()}) {
    for (double h : {0.5, 0.25}) {
      for (int trial = 0; trial < 6; ++trial) {
        LatticeSite x;
        x.k.resize(2);
        x.k << (trial % 3) - 1, (trial % 2) * 2 - 1;
        x.h = h;
        LatticeFunction f;
        for (int a = -2; a <= 2; ++a)
          for (int b = -2; b <= 2; ++b) {
            Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k(2);
            k << x.k(0) + a, x.k(1) + b;
            const double val =
                2.0 * halton(static_cast<std::uint64_t>(trial * 25 + (a + 2) * 5 + b + 2),
                             3) -
                1.0;
            f.values.emplace_back(k, val);
          }
        CHECK(verify_matrix_symbol_identity(m, h, x, f) <= 1e-12);
      }
    }
  }
}
