#include "latgreen/asymptotics.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "latgreen/errors.hpp"
#include "latgreen/finsler.hpp"
#include "latgreen/hamiltonian.hpp"
#include "latgreen/lattice_oracle.hpp"
#include "latgreen/spectral_oracle.hpp"

namespace latgreen {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

GreenGeometry green_geometry(const ModelSpec& m, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, const ShootOptions& opts) {
  if ((x - y).norm() == 0.0) throw ConfigError("green_geometry: coincident points");

  ShootOptions so = opts;
  so.run_conjugate_check = false;
  GreenGeometry geo;
  geo.d = m.d;
  geo.sol = shoot(m, y, x, so);
  if (!geo.sol.unique)
    throw GeometryError("green_geometry: minimizing geodesic is not unique");
  const ConjugateReport rep = conjugate_check(m, geo.sol);
  if (!rep.conjugate_free)
    throw GeometryError("green_geometry: conjugate point along the geodesic");
  geo.bordered_tau = rep.bordered.back();
  if (!(geo.bordered_tau > 0.0))
    throw GeometryError("green_geometry: nonpositive bordered determinant at the endpoint");

  geo.disp = dispersal_factor(m, geo.sol);
  geo.pv_y = geo.sol.p_y.dot(geo.sol.v_y);
  geo.pv_x = geo.sol.p_x.dot(geo.sol.v_x);
  geo.detG_y = finsler_tensor(m, geo.sol.y, geo.sol.v_y).G.determinant();
  geo.detG_x = finsler_tensor(m, geo.sol.x, geo.sol.v_x).G.determinant();
  geo.prefactor = std::pow(geo.detG_x * geo.detG_y, 0.25) /
                  (geo.disp.delta * std::sqrt(geo.pv_x * geo.pv_y));
  return geo;
}

AsymptoticEstimate green_leading(const GreenGeometry& geo, double h) {
  if (!(h > 0.0)) throw ConfigError("green_leading: spacing must be positive");
  AsymptoticEstimate est;
  est.route = AsymptoticRoute::GJacobi;
  est.dF = geo.sol.dF;
  est.prefactor = geo.prefactor;
  est.delta = geo.disp.delta;
  est.bordered = geo.bordered_tau;
  est.tau = geo.sol.tau;
  est.pv_x = geo.pv_x;
  est.pv_y = geo.pv_y;
  est.detG_x = geo.detG_x;
  est.detG_y = geo.detG_y;
  est.near_coincident_warning = est.dF < 10.0 * h;
  est.value = est.prefactor * std::exp(-est.dF / h) *
              std::pow(kTwoPi * est.dF / h, -0.5 * (geo.d - 1));
  return est;
}

AsymptoticEstimate green_leading(const ModelSpec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double h) {
  return green_leading(green_geometry(m, x, y), h);
}

AsymptoticEstimate green_leading_bordered(const GreenGeometry& geo, double h, int s) {
  if (!(h > 0.0)) throw ConfigError("green_leading_bordered: spacing must be positive");
  if (s != 1 && s != -1)
    throw ConfigError("green_leading_bordered: exponent sign must be +1 or -1");
  AsymptoticEstimate est = green_leading(geo, h);
  est.route = AsymptoticRoute::Bordered;
  if (!(est.bordered > 0.0))
    throw GeometryError("green_leading_bordered: nonpositive bordered determinant");
  est.value = std::exp(-est.dF / h) * std::pow(h / kTwoPi, 0.5 * (geo.d - 1)) *
              std::pow(est.bordered, 0.5 * s);
  return est;
}

AsymptoticEstimate green_leading_bordered(const ModelSpec& m, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y, double h, int s) {
  return green_leading_bordered(green_geometry(m, x, y), h, s);
}

OzValues green_oz(const ModelSpec& m, const Eigen::VectorXd& z, double h) {
  if (!(h > 0.0)) throw ConfigError("green_oz: spacing must be positive");
  if (z.norm() == 0.0) throw ConfigError("green_oz: zero displacement");
  if (!is_translation_invariant(m))
    throw ConfigError("green_oz: model is not translation invariant");

  const int d = m.d;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
  const DualPoint dual = dual_point(m, x0, z);

  OzValues oz;
  oz.znorm = z.norm();
  oz.F = dual.p.dot(z);

  double H;
  Eigen::VectorXd v;
  hamiltonian_and_grad_p(m, x0, dual.p, H, v);
  const Eigen::MatrixXd hperp = hpp_perp(m, x0, dual.p);
  const double det_perp = (d == 1) ? 1.0 : hperp.determinant();
  if (!(det_perp > 0.0))
    throw GeometryError("green_oz: projected momentum Hessian is not positive definite");
  oz.prefactor_ti1 = std::pow(v.norm(), 0.5 * (d - 3)) / std::sqrt(det_perp);

  const FinslerTensor ft = finsler_tensor(m, x0, z);
  oz.prefactor_ti2 = std::sqrt(ft.G.determinant()) / dual.p.dot(v);

  const double decay = std::exp(-oz.F / h);
  oz.ti1 = oz.prefactor_ti1 * std::pow(kTwoPi * oz.znorm / h, -0.5 * (d - 1)) * decay;
  oz.ti2 = oz.prefactor_ti2 * std::pow(kTwoPi * oz.F / h, -0.5 * (d - 1)) * decay;
  return oz;
}

std::vector<SweepRow> convergence_sweep(const ModelSpec& m, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y, int n_min, int n_max,
                                        OracleKind oracle, int threads,
                                        double oracle_target) {
  if (n_min > n_max) throw ConfigError("convergence_sweep: empty exponent range");
  const bool ti = is_translation_invariant(m);
  if (oracle == OracleKind::Auto)
    oracle = ti ? OracleKind::Spectral : OracleKind::Lattice;
  if (oracle == OracleKind::Spectral && !ti)
    throw ConfigError("convergence_sweep: spectral oracle needs a translation-invariant model");

  const GreenGeometry geo = green_geometry(m, x, y);

  std::vector<SweepRow> rows(static_cast<std::size_t>(n_max - n_min + 1));
  auto eval_one = [&](int idx) {
    const int n = n_min + idx;
    const double h = std::ldexp(1.0, -n);
    SweepRow& row = rows[static_cast<std::size_t>(idx)];
    row.n = n;
    row.h = h;
    const AsymptoticEstimate est = green_leading(geo, h);
    row.dF = est.dF;
    row.asymptotic = est.value;
    row.delta = est.delta;
    row.bordered = est.bordered;
    if (oracle == OracleKind::Spectral) {
      row.oracle = green_spectral_auto(m, x - y, h);
    } else {
      row.oracle = green_value(m, x, y, h, oracle_target);
    }
    row.ratio = row.oracle / row.asymptotic;
  };

  const int count = n_max - n_min + 1;
  if (threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) eval_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::min(threads, count);
    pool.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) eval_one(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace latgreen
