#include "latgreen/lattice_oracle.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>

#include "latgreen/errors.hpp"
#include "latgreen/finsler.hpp"
#include "latgreen/hamiltonian.hpp"

namespace latgreen {

std::int64_t Box::site_count() const {
  std::int64_t n = 1;
  for (int i = 0; i < dim(); ++i) {
    const std::int64_t side = hi(i) - lo(i) + 1;
    if (side <= 0) return 0;
    if (n > kSiteCap / side + 1) return kSiteCap + 1;  // saturate, no overflow
    n *= side;
  }
  return n;
}

bool Box::contains(const SiteKey& k) const {
  return (k.array() >= lo.array()).all() && (k.array() <= hi.array()).all();
}

std::int64_t BoxOperator::index_of(const SiteKey& k) const {
  if (!box.contains(k)) return -1;
  std::int64_t idx = 0;
  for (int i = 0; i < box.dim(); ++i) idx += (k(i) - box.lo(i)) * strides[static_cast<std::size_t>(i)];
  return idx;
}

SiteKey BoxOperator::site_of(std::int64_t row) const {
  const int d = box.dim();
  SiteKey k(d);
  for (int i = 0; i < d; ++i) {
    const std::int64_t s = strides[static_cast<std::size_t>(i)];
    k(i) = box.lo(i) + row / s;
    row %= s;
  }
  return k;
}

BoxOperator assemble(const ModelSpec& m, const Box& box, double h,
                     const Eigen::VectorXd& pbar) {
  const int d = m.d;
  if (box.dim() != d) throw ConfigError("assemble: box dimension mismatch");
  if (!(h > 0.0)) throw ConfigError("assemble: spacing must be positive");
  const std::int64_t n = box.site_count();
  if (n <= 0) throw ConfigError("assemble: empty box");
  if (n > kSiteCap) throw ConfigError("assemble: lattice box exceeds the site cap");

  BoxOperator op;
  op.box = box;
  op.h = h;
  op.tilted = pbar.size() == d && pbar.norm() > 0.0;
  op.pbar = op.tilted ? pbar : Eigen::VectorXd::Zero(d);
  op.strides.assign(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i)
    op.strides[static_cast<std::size_t>(i)] =
        op.strides[static_cast<std::size_t>(i + 1)] * (box.hi(i + 1) - box.lo(i + 1) + 1);

  const std::vector<Offset> offs = all_offsets(d, m.R);
  std::vector<double> tilt_factor(offs.size(), 1.0);
  if (op.tilted)
    for (std::size_t j = 0; j < offs.size(); ++j)
      tilt_factor[j] = std::exp(-op.pbar.dot(offs[j].cast<double>()));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (offs.size() + 1));
  SiteKey k = box.lo;
  Eigen::VectorXd xphys(d);
  for (std::int64_t row = 0; row < n; ++row) {
    xphys = h * k.cast<double>();
    trips.emplace_back(static_cast<int>(row), static_cast<int>(row), onsite_uh(m, xphys, h));
    for (std::size_t j = 0; j < offs.size(); ++j) {
      const SiteKey kn = k + offs[j].cast<std::int64_t>();
      const std::int64_t col = op.index_of(kn);
      if (col < 0) continue;  // Dirichlet: exterior neighbors dropped
      const Eigen::VectorXd mid = xphys + 0.5 * h * offs[j].cast<double>();
      trips.emplace_back(static_cast<int>(row), static_cast<int>(col),
                         -pair_v(m, mid, canonical(offs[j])) * tilt_factor[j]);
    }
    // odometer advance, last axis fastest
    for (int i = d - 1; i >= 0; --i) {
      if (++k(i) <= box.hi(i)) break;
      k(i) = box.lo(i);
    }
  }
  op.A.resize(static_cast<int>(n), static_cast<int>(n));
  op.A.setFromTriplets(trips.begin(), trips.end());
  op.A.makeCompressed();
  return op;
}

GreenColumn green_column(const BoxOperator& op, const SiteKey& y, SolveMethod method) {
  const std::int64_t src = op.index_of(y);
  if (src < 0) throw ConfigError("green_column: source site outside the box");

  Eigen::VectorXd b = Eigen::VectorXd::Zero(op.rows());
  b(src) = 1.0;

  Eigen::VectorXd g;
  if (method == SolveMethod::ConjugateGradient) {
    if (op.tilted)
      throw ConfigError("green_column: tilted operator requires the direct solver");
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
        cg(op.A);
    cg.setTolerance(1e-14);
    cg.setMaxIterations(20000);
    g = cg.solve(b);
    if (cg.info() != Eigen::Success)
      throw NumericalError("green_column: conjugate gradient did not converge");
  } else if (op.tilted) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(op.A);
    if (lu.info() != Eigen::Success)
      throw NumericalError("green_column: sparse LU factorization failed");
    g = lu.solve(b);
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(op.A);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError("green_column: sparse Cholesky factorization failed");
    g = ldlt.solve(b);
  }

  GreenColumn col;
  col.source_row = src;
  col.residual = (op.A * g - b).norm();  // ||b|| = 1
  const double tol = op.tilted ? 1e-12 : 1e-13;
  if (!(col.residual <= tol))
    throw NumericalError("green_column: linear-solve residual above tolerance");

  if (op.tilted) {
    // Untilt without overflow: value = sign * exp(log |g| - <pbar, kx - ky>).
    col.values.resize(g.size());
    for (std::int64_t row = 0; row < g.size(); ++row) {
      const double gv = g(row);
      if (gv == 0.0) {
        col.values(row) = 0.0;
        continue;
      }
      const double shift = op.pbar.dot((op.site_of(row) - y).cast<double>());
      col.values(row) = (gv > 0 ? 1.0 : -1.0) * std::exp(std::log(std::abs(gv)) - shift);
    }
  } else {
    col.values = std::move(g);
  }
  return col;
}

SiteKey grid_key(const Eigen::VectorXd& x, double h) {
  SiteKey k(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double q = x(i) / h;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9)
      throw ConfigError("grid_key: point is not on the h-grid");
    k(i) = static_cast<std::int64_t>(r);
  }
  return k;
}

Box choose_box(const ModelSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               double h, double target_rel_err) {
  const int d = m.d;
  if (!(target_rel_err > 0.0 && target_rel_err < 1.0))
    throw ConfigError("choose_box: target relative error must be in (0,1)");
  const SiteKey kx = grid_key(x, h), ky = grid_key(y, h);
  const Eigen::VectorXd center = 0.5 * (x + y);
  const double required = h * std::log(1.0 / target_rel_err);
  const double direct = (x - y).norm() > 0.0 ? finsler_norm(m, center, x - y) : 0.0;

  auto detour = [&](const Eigen::VectorXd& z) {
    const double a = (z - x).norm() > 0.0 ? finsler_norm(m, center, z - x) : 0.0;
    const double b = (z - y).norm() > 0.0 ? finsler_norm(m, center, z - y) : 0.0;
    return a + b - direct;
  };

  std::int64_t margin = std::max<std::int64_t>(2 * m.R, 2);  // floor 2R cells
  for (int attempt = 0; attempt < 64; ++attempt) {
    Box box;
    box.lo = (kx.cwiseMin(ky).array() - margin).matrix();
    box.hi = (kx.cwiseMax(ky).array() + margin).matrix();
    if (box.site_count() > kSiteCap)
      throw ConfigError("choose_box: required box exceeds the site cap");

    double worst = std::numeric_limits<double>::infinity();
    // Faces sampled with corners plus a low-discrepancy interior grid.
    const Eigen::VectorXd plo = h * box.lo.cast<double>();
    const Eigen::VectorXd phi = h * box.hi.cast<double>();
    for (int face = 0; face < 2 * d && worst >= required; ++face) {
      const int axis = face / 2;
      const double fixed = (face % 2 == 0) ? plo(axis) : phi(axis);
      for (int s = 0; s < 65 && worst >= required; ++s) {
        Eigen::VectorXd z(d);
        if (d == 2) {
          const int other = 1 - axis;
          z(axis) = fixed;
          z(other) = plo(other) + (phi(other) - plo(other)) * s / 64.0;
        } else {
          const Eigen::VectorXd u = halton_point(static_cast<std::uint64_t>(s), d - 1);
          int j = 0;
          for (int i = 0; i < d; ++i) {
            if (i == axis) {
              z(i) = fixed;
            } else {
              z(i) = plo(i) + (phi(i) - plo(i)) * u(j++);
            }
          }
        }
        worst = std::min(worst, detour(z));
      }
    }
    if (worst >= required) return box;
    margin = margin + margin / 2 + 1;
  }
  throw NumericalError("choose_box: margin search did not terminate");
}

Eigen::VectorXd lattice_tilt(const ModelSpec& m, const Box& box, double h,
                             const Eigen::VectorXd& z) {
  const int d = m.d;
  if (z.size() != d || z.norm() == 0.0) return Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd center =
      0.5 * h * (box.lo.cast<double>() + box.hi.cast<double>());
  const Eigen::VectorXd p0 = dual_point(m, center, z).p;

  // Sites where H(., pbar) < 0 must hold: corners plus a Halton sample.
  std::vector<Eigen::VectorXd> probes;
  const SampleBox sb{h * box.lo.cast<double>(), h * box.hi.cast<double>()};
  for (int c = 0; c < (1 << d); ++c) {
    Eigen::VectorXd corner(d);
    for (int i = 0; i < d; ++i) corner(i) = (c >> i & 1) ? sb.hi(i) : sb.lo(i);
    probes.push_back(corner);
  }
  for (int s = 0; s < 200; ++s) probes.push_back(sample_in_box(sb, static_cast<std::uint64_t>(s)));

  double scale = 0.9;
  for (int it = 0; it < 300; ++it) {
    const Eigen::VectorXd pbar = scale * p0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& q : probes) worst = std::max(worst, hamiltonian(m, q, pbar));
    if (worst < 0.0) return pbar;
    scale *= 0.95;
    if (scale * p0.norm() < 1e-8) break;
  }
  return Eigen::VectorXd::Zero(d);  // untilted fallback
}

double green_value(const ModelSpec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double h, double target_rel_err, bool tilt) {
  const Box box = choose_box(m, x, y, h, target_rel_err);
  const Eigen::VectorXd pbar =
      tilt ? lattice_tilt(m, box, h, x - y) : Eigen::VectorXd::Zero(m.d);
  const BoxOperator op = assemble(m, box, h, pbar);
  const GreenColumn col = green_column(op, grid_key(y, h));
  const std::int64_t row = op.index_of(grid_key(x, h));
  if (row < 0) throw ConfigError("green_value: query point outside the box");
  return col.values(row);
}

}  // namespace latgreen
