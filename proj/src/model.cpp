#include "latgreen/model.hpp"

#include <algorithm>
#include <cmath>

namespace latgreen {
namespace {

void enumerate(int d, int R, Eigen::VectorXi& ell, int axis, std::vector<Offset>& out) {
  if (axis == d) {
    if (ell.squaredNorm() > 0 && ell.squaredNorm() <= R * R && is_canonical(ell))
      out.push_back(ell);
    return;
  }
  for (int v = -R; v <= R; ++v) {
    ell(axis) = v;
    enumerate(d, R, ell, axis + 1, out);
  }
}

const PairField& find_pair(const ModelSpec& m, const Offset& ell) {
  const Offset c = canonical(ell);
  for (const auto& p : m.pairs)
    if (p.offset == c) return p;
  throw ConfigError("model: offset out of range");
}

std::string offset_str(const Offset& ell) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < ell.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ell(i));
  }
  return s + ")";
}

}  // namespace

bool is_canonical(const Offset& ell) {
  for (Eigen::Index i = 0; i < ell.size(); ++i) {
    if (ell(i) > 0) return true;
    if (ell(i) < 0) return false;
  }
  return false;  // zero offset has no canonical form
}

Offset canonical(const Offset& ell) { return is_canonical(ell) ? ell : Offset(-ell); }

std::vector<Offset> canonical_offsets(int d, int R) {
  std::vector<Offset> out;
  Eigen::VectorXi ell = Eigen::VectorXi::Zero(d);
  enumerate(d, R, ell, 0, out);
  return out;
}

std::vector<Offset> all_offsets(int d, int R) {
  std::vector<Offset> out;
  for (const auto& ell : canonical_offsets(d, R)) {
    out.push_back(ell);
    out.push_back(-ell);
  }
  return out;
}

ModelSpec make_model(int d, int R, double J, const std::string& dpp_expr,
                     const std::vector<std::pair<Offset, std::string>>& wpp_exprs) {
  if (d < 2) throw ConfigError("model: dimension must be >= 2");
  if (R < 1) throw ConfigError("model: interaction radius must be >= 1");
  if (!(J > 0)) throw ConfigError("model: coupling J must be > 0");
  ModelSpec m;
  m.d = d;
  m.R = R;
  m.J = J;
  m.dpp = parse(dpp_expr, d);

  const std::vector<Offset> canon = canonical_offsets(d, R);
  std::vector<bool> seen(canon.size(), false);
  m.pairs.resize(canon.size());
  for (std::size_t i = 0; i < canon.size(); ++i) m.pairs[i].offset = canon[i];

  for (const auto& [ell, expr] : wpp_exprs) {
    if (ell.size() != d) throw ConfigError("model: offset dimension mismatch");
    const int n2 = ell.squaredNorm();
    if (n2 == 0 || n2 > R * R)
      throw ConfigError("model: offset out of range " + offset_str(ell));
    const Offset c = canonical(ell);
    const auto it = std::find(canon.begin(), canon.end(), c);
    const std::size_t idx = static_cast<std::size_t>(it - canon.begin());
    if (seen[idx])
      throw ConfigError("model: duplicate coupling for offset pair " + offset_str(c));
    seen[idx] = true;
    m.pairs[idx].field = parse(expr, d);
  }
  for (std::size_t i = 0; i < canon.size(); ++i)
    if (!seen[i])
      throw ConfigError("model: missing coupling for offset pair " + offset_str(canon[i]));
  return m;
}

ModelSpec make_uniform_model(int d, int R, double J, const std::string& dpp_expr,
                             const std::string& wpp_expr) {
  std::vector<std::pair<Offset, std::string>> wpp;
  for (const auto& ell : canonical_offsets(d, R)) wpp.emplace_back(ell, wpp_expr);
  return make_model(d, R, J, dpp_expr, wpp);
}

double pair_v(const ModelSpec& m, const Eigen::VectorXd& x, const Offset& ell) {
  return m.J * eval_value(find_pair(m, ell).field, x);
}

FieldEval pair_v_eval2(const ModelSpec& m, const Eigen::VectorXd& x, const Offset& ell) {
  FieldEval fe = eval2(find_pair(m, ell).field, x);
  fe.value *= m.J;
  fe.gradient *= m.J;
  fe.hessian *= m.J;
  return fe;
}

double onsite_u(const ModelSpec& m, const Eigen::VectorXd& x) {
  double u = eval_value(m.dpp, x);
  for (const auto& p : m.pairs) u += 2.0 * m.J * eval_value(p.field, x);
  return u;
}

double onsite_uh(const ModelSpec& m, const Eigen::VectorXd& x, double h) {
  double u = eval_value(m.dpp, x);
  for (const auto& p : m.pairs) {
    const Eigen::VectorXd half = 0.5 * h * p.offset.cast<double>();
    u += m.J * (eval_value(p.field, x + half) + eval_value(p.field, x - half));
  }
  return u;
}

double matrix_entry(const ModelSpec& m, const LatticeSite& x, const LatticeSite& y) {
  if (x.h != y.h) throw ConfigError("matrix_entry: mismatched spacings");
  if (x.k.size() != m.d || y.k.size() != m.d)
    throw ConfigError("matrix_entry: site dimension mismatch");
  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> diff = x.k - y.k;
  if (diff.squaredNorm() == 0) return onsite_uh(m, x.physical(), x.h);
  if (diff.squaredNorm() > static_cast<std::int64_t>(m.R) * m.R) return 0.0;
  const Eigen::VectorXd mid = 0.5 * (x.physical() + y.physical());
  return -pair_v(m, mid, diff.cast<int>());
}

}  // namespace latgreen
