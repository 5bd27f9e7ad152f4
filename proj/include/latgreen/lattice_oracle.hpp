#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "latgreen/model.hpp"

namespace latgreen {

using SiteKey = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct Box {
  SiteKey lo, hi;  // inclusive integer coordinate ranges

  int dim() const { return static_cast<int>(lo.size()); }
  std::int64_t site_count() const;
  bool contains(const SiteKey& k) const;
};

// Dirichlet truncation of the lattice Hessian to a box, optionally conjugated
// by the exponential tilt exp(<pbar, x>/h): entry(x,y) *= exp(<pbar, x-y>/h).
struct BoxOperator {
  Box box;
  double h{1.0};
  Eigen::VectorXd pbar;  // empty or zero: untilted
  bool tilted{false};
  Eigen::SparseMatrix<double> A;
  std::vector<std::int64_t> strides;

  std::int64_t rows() const { return A.rows(); }
  std::int64_t index_of(const SiteKey& k) const;  // -1 outside the box
  SiteKey site_of(std::int64_t row) const;
};

inline constexpr std::int64_t kSiteCap = 4000000;

BoxOperator assemble(const ModelSpec& m, const Box& box, double h,
                     const Eigen::VectorXd& pbar = Eigen::VectorXd());

enum class SolveMethod { Direct, ConjugateGradient };

struct GreenColumn {
  Eigen::VectorXd values;     // untilted Green entries, indexed by row
  double residual{0.0};       // relative residual of the solved linear system
  std::int64_t source_row{-1};
};

// Column y of the inverse: solve with a unit right-hand side and undo the
// tilt row by row.  The conjugate-gradient path requires an untilted
// (symmetric positive definite) operator.
GreenColumn green_column(const BoxOperator& op, const SiteKey& y,
                         SolveMethod method = SolveMethod::Direct);

// Smallest margin around the bounding box of {x,y} such that every boundary
// detour costs at least h*ln(1/target_rel_err) of extra Finsler length,
// estimated with the metric frozen at the segment midpoint.
Box choose_box(const ModelSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               double h, double target_rel_err);

// 0.9 * dual momentum of the displacement direction, shrunk further until
// H(., pbar) < 0 at every sampled box site.  Zero displacement or repeated
// failure yields the untilted fallback.
Eigen::VectorXd lattice_tilt(const ModelSpec& m, const Box& box, double h,
                             const Eigen::VectorXd& z);

// choose_box + tilt + assemble + solve; the Green value at x for source y.
double green_value(const ModelSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double h, double target_rel_err = 1e-8, bool tilt = true);

// Round a physical point to its integer grid key; off-grid points are
// rejected.
SiteKey grid_key(const Eigen::VectorXd& x, double h);

}  // namespace latgreen
