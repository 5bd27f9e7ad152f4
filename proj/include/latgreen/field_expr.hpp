#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latgreen/errors.hpp"
#include "latgreen/jet.hpp"

namespace latgreen {

// Immutable expression tree for a smooth scalar field on R^d.  Variables are
// x1..xd; supported functions are sin, cos, exp, cosh, sinh, sqrt, log, plus
// the constant pi.  Nodes live in a flat pool; `root` indexes the pool.
struct FieldExpr {
  enum class Kind : std::uint8_t { Literal, Variable, Unary, Binary, Call };
  enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div };
  enum class Fn : std::uint8_t { Sin, Cos, Exp, Cosh, Sinh, Sqrt, Log };

  struct Node {
    Kind kind{Kind::Literal};
    double literal{0.0};
    int variable{0};  // 0-based variable index
    BinaryOp op{BinaryOp::Add};
    Fn fn{Fn::Sin};
    int a{-1};
    int b{-1};
  };

  std::vector<Node> nodes;
  int root{-1};
  int dim{0};
};

struct FieldEval {
  double value{0.0};
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Throws ConfigError with a position-annotated message on bad input.
FieldExpr parse(std::string_view text, int d);

// Emits a parenthesized form that parses back to an equivalent tree.
std::string print(const FieldExpr& expr);

// True when no variable occurs in the tree.
bool is_constant(const FieldExpr& expr);

namespace detail {
template <typename S>
S eval_node(const FieldExpr& e, int idx, std::span<const S> x);
}

// Evaluate over any scalar supporting the grammar's functions (double for
// plain values, Jet2<double> for derivatives).
template <typename S>
S eval(const FieldExpr& expr, std::span<const S> x) {
  return detail::eval_node<S>(expr, expr.root, x);
}

double eval_value(const FieldExpr& expr, const Eigen::VectorXd& x);
FieldEval eval2(const FieldExpr& expr, const Eigen::VectorXd& x);

namespace detail {

template <typename S>
S eval_node(const FieldExpr& e, int idx, std::span<const S> x) {
  const FieldExpr::Node& n = e.nodes[static_cast<std::size_t>(idx)];
  switch (n.kind) {
    case FieldExpr::Kind::Literal:
      if constexpr (std::is_same_v<S, double>) {
        return n.literal;
      } else {
        return S::constant(n.literal, static_cast<Eigen::Index>(x.size()));
      }
    case FieldExpr::Kind::Variable:
      return x[static_cast<std::size_t>(n.variable)];
    case FieldExpr::Kind::Unary:
      return -eval_node<S>(e, n.a, x);
    case FieldExpr::Kind::Binary: {
      const S a = eval_node<S>(e, n.a, x);
      const S b = eval_node<S>(e, n.b, x);
      switch (n.op) {
        case FieldExpr::BinaryOp::Add:
          return a + b;
        case FieldExpr::BinaryOp::Sub:
          return a - b;
        case FieldExpr::BinaryOp::Mul:
          return a * b;
        case FieldExpr::BinaryOp::Div:
          return a / b;
      }
      break;
    }
    case FieldExpr::Kind::Call: {
      const S a = eval_node<S>(e, n.a, x);
      using std::cos;
      using std::cosh;
      using std::exp;
      using std::log;
      using std::sin;
      using std::sinh;
      using std::sqrt;
      switch (n.fn) {
        case FieldExpr::Fn::Sin:
          return sin(a);
        case FieldExpr::Fn::Cos:
          return cos(a);
        case FieldExpr::Fn::Exp:
          return exp(a);
        case FieldExpr::Fn::Cosh:
          return cosh(a);
        case FieldExpr::Fn::Sinh:
          return sinh(a);
        case FieldExpr::Fn::Sqrt:
          return sqrt(a);
        case FieldExpr::Fn::Log:
          return log(a);
      }
      break;
    }
  }
  throw NumericalError("field expression: corrupt node pool");
}

}  // namespace detail
}  // namespace latgreen
