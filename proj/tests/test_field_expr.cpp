#include <cmath>
#include <numbers>

#include "doctest.h"
#include "latgreen/errors.hpp"
#include "latgreen/field_expr.hpp"
#include "latgreen/sampling.hpp"

using namespace latgreen;

TEST_CASE("parsed fields match hand-coded evaluations") {
  const FieldExpr dpp = parse("1 + 0.2*sin(x1 + x2)", 2);
  const FieldExpr wpp = parse("2*(1 + 0.1*cos(x1))", 2);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = 8.0 * halton_point(i, 2).array() - 4.0;
    CHECK(eval_value(dpp, x) == doctest::Approx(1.0 + 0.2 * std::sin(x(0) + x(1)))
                                    .epsilon(1e-15));
    CHECK(eval_value(wpp, x) == doctest::Approx(2.0 * (1.0 + 0.1 * std::cos(x(0))))
                                    .epsilon(1e-15));
  }
}

TEST_CASE("precedence and literals") {
  const FieldExpr e = parse("1 + 2*3 - 4/8", 1);
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(eval_value(e, x) == doctest::Approx(6.5).epsilon(1e-16));

  const FieldExpr u = parse("-x1*x1 + pi", 1);
  x << 3.0;
  CHECK(eval_value(u, x) == doctest::Approx(std::numbers::pi - 9.0).epsilon(1e-16));

  const FieldExpr nested = parse("exp(log(sqrt(cosh(0.3)*cosh(0.3))))", 1);
  CHECK(eval_value(nested, x) == doctest::Approx(std::cosh(0.3)).epsilon(1e-14));
}

TEST_CASE("autodiff gradient and hessian match finite differences") {
  const FieldExpr f = parse("sin(x1*x2) + exp(0.3*x1) - x2*x2*log(2 + cosh(x1))", 2);
  const double eps = 1e-5;
  for (int i = 0; i < 40; ++i) {
    const Eigen::VectorXd x = 4.0 * halton_point(i, 2).array() - 2.0;
    const FieldEval r = eval2(f, x);
    CHECK(r.value == doctest::Approx(eval_value(f, x)).epsilon(1e-15));
    for (int a = 0; a < 2; ++a) {
      Eigen::VectorXd xp = x, xm = x;
      xp(a) += eps;
      xm(a) -= eps;
      const double fd = (eval_value(f, xp) - eval_value(f, xm)) / (2 * eps);
      CHECK(r.gradient(a) == doctest::Approx(fd).epsilon(1e-7));
      for (int b = 0; b < 2; ++b) {
        Eigen::VectorXd q1 = x, q2 = x, q3 = x, q4 = x;
        q1(a) += eps; q1(b) += eps;
        q2(a) += eps; q2(b) -= eps;
        q3(a) -= eps; q3(b) += eps;
        q4(a) -= eps; q4(b) -= eps;
        const double fd2 = (eval_value(f, q1) - eval_value(f, q2) - eval_value(f, q3) +
                            eval_value(f, q4)) /
                           (4 * eps * eps);
        CHECK(r.hessian(a, b) == doctest::Approx(fd2).epsilon(5e-5).scale(1.0));
      }
    }
    CHECK((r.hessian - r.hessian.transpose()).norm() == 0.0);
  }
}

TEST_CASE("print emits a form that parses back to the same values") {
  const char* sources[] = {
      "1 + 0.2*sin(x1 + x2)",
      "2*(1 + 0.1*cos(x1))",
      "-x1/3 + sqrt(2 + x2*x2) - exp(-x1)*sinh(x2) + pi/4",
  };
  for (const char* s : sources) {
    const FieldExpr e = parse(s, 2);
    const FieldExpr back = parse(print(e), 2);
    for (int i = 0; i < 25; ++i) {
      const Eigen::VectorXd x = 6.0 * halton_point(i, 2).array() - 3.0;
      CHECK(eval_value(e, x) == eval_value(back, x));
    }
  }
}

TEST_CASE("is_constant") {
  CHECK(is_constant(parse("1 + pi/2", 3)));
  CHECK(!is_constant(parse("1 + 0*x2", 3)));
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS((void)parse("1 +", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("x3", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("foo(x1)", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("sin", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("(1", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("1 ** 2", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("x1^2", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("", 2), ConfigError);
  CHECK_THROWS_AS((void)parse("x1", 0), ConfigError);
  try {
    (void)parse("1 + * 2", 2);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("domain errors surface as numerical errors") {
  Eigen::VectorXd x(1);
  x << -1.0;
  CHECK_THROWS_AS((void)eval_value(parse("log(x1)", 1), x), NumericalError);
  CHECK_THROWS_AS((void)eval_value(parse("sqrt(x1)", 1), x), NumericalError);
  x << 0.0;
  CHECK_THROWS_AS((void)eval_value(parse("1/x1", 1), x), NumericalError);
  CHECK_THROWS_AS((void)eval2(parse("log(x1)", 1), x), NumericalError);
}
