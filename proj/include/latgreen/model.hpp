#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "latgreen/field_expr.hpp"
#include "latgreen/sampling.hpp"

namespace latgreen {

using Offset = Eigen::VectorXi;

// One coupling field per +/- offset pair; evenness in the offset is
// structural (the negative representative shares the stored field).
struct PairField {
  Offset offset;    // canonical representative: first nonzero component > 0
  FieldExpr field;  // second theta-derivative of the pair potential at 0
};

// Quadratic data of the spin model at the zero configuration.  `dpp` is the
// on-site field, `pairs` holds the coupling fields for all offsets ell with
// 0 < |ell| <= R (Euclidean), one entry per +/- pair.
struct ModelSpec {
  int d{0};
  int R{1};
  double J{0.0};
  FieldExpr dpp;
  std::vector<PairField> pairs;
};

// Point of the grid h*Z^d, kept in exact integer coordinates.
struct LatticeSite {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k;
  double h{1.0};

  Eigen::VectorXd physical() const { return h * k.cast<double>(); }
};

// All offsets with 0 < |ell| <= R, canonical representatives only, in a fixed
// deterministic order.
std::vector<Offset> canonical_offsets(int d, int R);

// Both signs, canonical pairs expanded.
std::vector<Offset> all_offsets(int d, int R);

bool is_canonical(const Offset& ell);
Offset canonical(const Offset& ell);

// wpp expressions keyed by offset (either sign accepted, duplicates rejected);
// every canonical pair must be covered.
ModelSpec make_model(int d, int R, double J, const std::string& dpp_expr,
                     const std::vector<std::pair<Offset, std::string>>& wpp_exprs);

// Same wpp expression for every offset pair.
ModelSpec make_uniform_model(int d, int R, double J, const std::string& dpp_expr,
                             const std::string& wpp_expr);

// V(x,ell) = J * wpp[ell](x).
double pair_v(const ModelSpec& m, const Eigen::VectorXd& x, const Offset& ell);

// V with gradient and Hessian in x.
FieldEval pair_v_eval2(const ModelSpec& m, const Eigen::VectorXd& x, const Offset& ell);

// U(x) = dpp(x) + sum_ell V(x,ell).
double onsite_u(const ModelSpec& m, const Eigen::VectorXd& x);

// U_h(x) = dpp(x) + J * sum_ell wpp[ell](x + h*ell/2).
double onsite_uh(const ModelSpec& m, const Eigen::VectorXd& x, double h);

// Entry of the lattice Hessian: U_h on the diagonal, -V(midpoint, (x-y)/h)
// within interaction range, zero beyond.
double matrix_entry(const ModelSpec& m, const LatticeSite& x, const LatticeSite& y);

struct HypothesisCheck {
  std::string name;
  bool pass{false};
  double worst{0.0};
  Eigen::VectorXd worst_x;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool all_pass{false};
  double inf_dpp{0.0};
  double sup_dpp{0.0};
};

// Sampled verification of the model hypotheses on a box: coupling
// nonnegativity (and >= 1 at unit offsets), the on-site two-sided bound
// 2*inf dpp > sup dpp, H(x,0) < 0, strict diagonal dominance of the lattice
// Hessian rows, and positivity of the sampled Finsler norm.
HypothesisReport check_hypotheses(const ModelSpec& m, const SampleBox& box,
                                  int n_samples = 10000);

// Throws HypothesisError if any check fails.
void require_hypotheses(const ModelSpec& m, const SampleBox& box, int n_samples = 10000);

}  // namespace latgreen
