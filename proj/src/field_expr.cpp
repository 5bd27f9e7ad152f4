#include "latgreen/field_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace latgreen {
namespace {

struct Parser {
  std::string_view text;
  std::size_t pos{0};
  int dim{0};
  FieldExpr out;

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ConfigError("field expression, position " + std::to_string(at + 1) +
                      ": " + msg);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  int add(FieldExpr::Node n) {
    out.nodes.push_back(n);
    return static_cast<int>(out.nodes.size()) - 1;
  }

  int literal(double v) {
    FieldExpr::Node n;
    n.kind = FieldExpr::Kind::Literal;
    n.literal = v;
    return add(n);
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_ws();
      if (pos >= text.size()) return lhs;
      const char c = text[pos];
      if (c != '+' && c != '-') return lhs;
      ++pos;
      const int rhs = parse_term();
      FieldExpr::Node n;
      n.kind = FieldExpr::Kind::Binary;
      n.op = (c == '+') ? FieldExpr::BinaryOp::Add : FieldExpr::BinaryOp::Sub;
      n.a = lhs;
      n.b = rhs;
      lhs = add(n);
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (pos >= text.size()) return lhs;
      const char c = text[pos];
      if (c != '*' && c != '/') return lhs;
      ++pos;
      const int rhs = parse_factor();
      FieldExpr::Node n;
      n.kind = FieldExpr::Kind::Binary;
      n.op = (c == '*') ? FieldExpr::BinaryOp::Mul : FieldExpr::BinaryOp::Div;
      n.a = lhs;
      n.b = rhs;
      lhs = add(n);
    }
  }

  int parse_factor() {
    skip_ws();
    if (consume('-')) {
      FieldExpr::Node n;
      n.kind = FieldExpr::Kind::Unary;
      n.a = parse_factor();
      return add(n);
    }
    return parse_primary();
  }

  int parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail(pos, "unexpected end of input");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      const int inner = parse_expr();
      if (!consume(')')) fail(pos, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(pos, std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const std::size_t start = pos;
    double value = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail(start, "malformed number");
    pos += static_cast<std::size_t>(ptr - begin);
    return literal(value);
  }

  int parse_ident() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string_view name = text.substr(start, pos - start);
    if (name == "pi") return literal(std::numbers::pi);
    if (name.size() >= 2 && name[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc() && ptr == name.data() + name.size()) {
        if (idx < 1 || idx > dim)
          fail(start, "variable index out of range: " + std::string(name) +
                          " (dimension is " + std::to_string(dim) + ")");
        FieldExpr::Node n;
        n.kind = FieldExpr::Kind::Variable;
        n.variable = idx - 1;
        return add(n);
      }
    }
    static constexpr std::pair<std::string_view, FieldExpr::Fn> fns[] = {
        {"sin", FieldExpr::Fn::Sin},   {"cos", FieldExpr::Fn::Cos},
        {"exp", FieldExpr::Fn::Exp},   {"cosh", FieldExpr::Fn::Cosh},
        {"sinh", FieldExpr::Fn::Sinh}, {"sqrt", FieldExpr::Fn::Sqrt},
        {"log", FieldExpr::Fn::Log}};
    for (const auto& [fname, fn] : fns) {
      if (name == fname) {
        if (!consume('(')) fail(pos, "expected '(' after function name");
        const int arg = parse_expr();
        if (!consume(')')) fail(pos, "expected ')'");
        FieldExpr::Node n;
        n.kind = FieldExpr::Kind::Call;
        n.fn = fn;
        n.a = arg;
        return add(n);
      }
    }
    fail(start, "unknown identifier '" + std::string(name) + "'");
  }
};

int precedence(const FieldExpr::Node& n) {
  switch (n.kind) {
    case FieldExpr::Kind::Binary:
      return (n.op == FieldExpr::BinaryOp::Add || n.op == FieldExpr::BinaryOp::Sub) ? 1
                                                                                    : 2;
    case FieldExpr::Kind::Unary:
      return 3;
    default:
      return 4;
  }
}

std::string format_literal(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void print_node(const FieldExpr& e, int idx, std::string& s) {
  const FieldExpr::Node& n = e.nodes[static_cast<std::size_t>(idx)];
  auto child = [&](int ci, bool need_paren) {
    if (need_paren) s += '(';
    print_node(e, ci, s);
    if (need_paren) s += ')';
  };
  switch (n.kind) {
    case FieldExpr::Kind::Literal:
      if (n.literal < 0) {
        s += '(';
        s += format_literal(n.literal);
        s += ')';
      } else {
        s += format_literal(n.literal);
      }
      return;
    case FieldExpr::Kind::Variable:
      s += 'x';
      s += std::to_string(n.variable + 1);
      return;
    case FieldExpr::Kind::Unary:
      s += '-';
      child(n.a, precedence(e.nodes[static_cast<std::size_t>(n.a)]) < 3);
      return;
    case FieldExpr::Kind::Binary: {
      const int p = precedence(n);
      const char* ops[] = {" + ", " - ", "*", "/"};
      child(n.a, precedence(e.nodes[static_cast<std::size_t>(n.a)]) < p);
      s += ops[static_cast<int>(n.op)];
      const bool strict = n.op == FieldExpr::BinaryOp::Sub || n.op == FieldExpr::BinaryOp::Div;
      child(n.b, precedence(e.nodes[static_cast<std::size_t>(n.b)]) < p + (strict ? 1 : 0));
      return;
    }
    case FieldExpr::Kind::Call: {
      const char* names[] = {"sin", "cos", "exp", "cosh", "sinh", "sqrt", "log"};
      s += names[static_cast<int>(n.fn)];
      s += '(';
      print_node(e, n.a, s);
      s += ')';
      return;
    }
  }
}

}  // namespace

FieldExpr parse(std::string_view text, int d) {
  if (d < 1) throw ConfigError("field expression: dimension must be >= 1");
  Parser p;
  p.text = text;
  p.dim = d;
  p.out.dim = d;
  p.out.root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail(p.pos, "trailing input");
  return std::move(p.out);
}

std::string print(const FieldExpr& expr) {
  std::string s;
  print_node(expr, expr.root, s);
  return s;
}

bool is_constant(const FieldExpr& expr) {
  for (const auto& n : expr.nodes)
    if (n.kind == FieldExpr::Kind::Variable) return false;
  return true;
}

double eval_value(const FieldExpr& expr, const Eigen::VectorXd& x) {
  const double v = eval<double>(expr, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  if (!std::isfinite(v))
    throw NumericalError("field expression: non-finite value (domain error)");
  return v;
}

FieldEval eval2(const FieldExpr& expr, const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  std::vector<Jet2<double>> seeds;
  seeds.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    seeds.push_back(Jet2<double>::variable(x(i), d, i));
  Jet2<double> r = eval<Jet2<double>>(
      expr, std::span<const Jet2<double>>(seeds.data(), seeds.size()));
  if (!std::isfinite(r.v))
    throw NumericalError("field expression: non-finite value (domain error)");
  FieldEval fe;
  fe.value = r.v;
  fe.gradient = std::move(r.g);
  // jets keep the Hessian symmetric up to contraction rounding; pin it exactly
  fe.hessian = 0.5 * (r.h + r.h.transpose());
  return fe;
}

}  // namespace latgreen
