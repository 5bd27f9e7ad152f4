#include "latgreen/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "latgreen/angles.hpp"
#include "latgreen/errors.hpp"
#include "latgreen/jacobi.hpp"
#include "latgreen/ode.hpp"
#include "latgreen/sampling.hpp"

namespace latgreen {
namespace {

// Shooting unknowns: z = (theta_1..theta_{d-1}, tau).
Eigen::VectorXd momentum_of_angles(const ModelSpec& m, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& theta) {
  const Eigen::VectorXd u = angles_to_direction(theta, m.d);
  return figuratrix_radius(m, y, u) * u;
}

// Endpoint of the light flow (no sample recording).
Eigen::VectorXd flow_endpoint(const ModelSpec& m, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& p0, double tau, double rtol,
                              double atol, Eigen::VectorXd* p_end = nullptr) {
  const int d = m.d;
  Eigen::VectorXd state(2 * d);
  state.head(d) = y;
  state.tail(d) = p0;
  auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    const PhaseDerivs pd = phase_derivs(m, s.head(d), s.tail(d));
    ds.head(d) = pd.dHdp;
    ds.tail(d) = -pd.dHdx;
  };
  integrate_dopri5(rhs, 0.0, tau, state, OdeOptions{rtol, atol, 0.0, 400000});
  if (p_end) *p_end = state.tail(d);
  return state.head(d);
}

Eigen::VectorXd shoot_endpoint(const ModelSpec& m, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& z, double rtol, double atol,
                               Eigen::VectorXd* p0_out = nullptr,
                               Eigen::VectorXd* p_end = nullptr) {
  const int d = m.d;
  const Eigen::VectorXd p0 = momentum_of_angles(m, y, z.head(d - 1));
  if (p0_out) *p0_out = p0;
  return flow_endpoint(m, y, p0, z(d - 1), rtol, atol, p_end);
}

struct NewtonResult {
  Eigen::VectorXd z;      // converged unknowns
  Eigen::VectorXd p0;     // momentum on the figuratrix at y
  double residual{0.0};
};

std::optional<NewtonResult> shoot_newton(const ModelSpec& m, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& x, Eigen::VectorXd z,
                                         const ShootOptions& opts) {
  const int d = m.d;
  const double tol = 1e-10 * (1.0 + (x - y).norm());
  // The Newton iteration runs at a slightly relaxed integrator tolerance;
  // the converged solution is re-flown at full tolerance by the caller.
  const double rtol = opts.rtol, atol = opts.atol;

  auto residual = [&](const Eigen::VectorXd& zz) -> Eigen::VectorXd {
    return shoot_endpoint(m, y, zz, rtol, atol) - x;
  };

  Eigen::VectorXd r;
  try {
    r = residual(z);
  } catch (const NumericalError&) {
    return std::nullopt;
  }

  for (int it = 0; it < opts.max_newton; ++it) {
    const double rn = r.norm();
    if (rn <= tol) {
      NewtonResult out;
      out.z = z;
      out.p0 = momentum_of_angles(m, y, z.head(d - 1));
      out.residual = rn;
      return out;
    }
    Eigen::MatrixXd Jz(d, d);
    try {
      for (int j = 0; j < d; ++j) {
        const double eps = (j == d - 1) ? 1e-6 * std::max(1.0, std::abs(z(j))) : 1e-6;
        Eigen::VectorXd zp = z, zm = z;
        zp(j) += eps;
        zm(j) -= eps;
        Jz.col(j) = (residual(zp) - residual(zm)) / (2.0 * eps);
      }
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    const Eigen::VectorXd step = Jz.partialPivLu().solve(-r);
    if (!step.allFinite()) return std::nullopt;

    bool advanced = false;
    double s = 1.0;
    for (int halving = 0; halving < 25; ++halving) {
      Eigen::VectorXd z_try = z + s * step;
      if (z_try(d - 1) <= 0.0) {  // keep the flight time positive
        s *= 0.5;
        continue;
      }
      Eigen::VectorXd r_try;
      try {
        r_try = residual(z_try);
      } catch (const NumericalError&) {
        s *= 0.5;
        continue;
      }
      if (r_try.norm() < (1.0 - 1e-4 * s) * rn) {
        z = z_try;
        r = r_try;
        advanced = true;
        break;
      }
      s *= 0.5;
    }
    if (!advanced) return std::nullopt;
  }
  return std::nullopt;
}

GeodesicSolution build_solution(const ModelSpec& m, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& x, const NewtonResult& nr,
                                const ShootOptions& opts) {
  GeodesicSolution sol;
  sol.y = y;
  sol.x = x;
  sol.tau = nr.z(m.d - 1);
  sol.p_y = nr.p0;

  FlowOptions fo;
  fo.rtol = opts.rtol;
  fo.atol = opts.atol;
  fo.with_samples = true;
  fo.with_arc = true;
  sol.traj = flow(m, y, nr.p0, sol.tau, fo);

  double H;
  Eigen::VectorXd dHdp;
  hamiltonian_and_grad_p(m, y, sol.p_y, H, dHdp);
  sol.v_y = dHdp;
  sol.p_x = sol.traj.p.back();
  hamiltonian_and_grad_p(m, sol.traj.x.back(), sol.p_x, H, dHdp);
  sol.v_x = dHdp;
  sol.dF = sol.traj.arc_support.back();
  sol.dF_integral_f = sol.traj.arc_finsler.back();
  return sol;
}

}  // namespace

Trajectory flow(const ModelSpec& m, const Eigen::VectorXd& y, const Eigen::VectorXd& p0,
                double tau, const FlowOptions& opts) {
  if (tau < 0.0) throw ConfigError("flow: negative flight time");
  const int d = m.d;
  const double scale = level_scale(m, y);
  if (std::abs(hamiltonian(m, y, p0)) > 1e-9 * scale)
    throw NumericalError("flow: initial momentum is not on the zero level set");

  const int n_state = 2 * d + (opts.with_arc ? 2 : 1);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(n_state);
  state.head(d) = y;
  state.segment(d, d) = p0;

  auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    const Eigen::VectorXd xx = s.head(d);
    const Eigen::VectorXd pp = s.segment(d, d);
    const PhaseDerivs pd = phase_derivs(m, xx, pp);
    ds.resize(n_state);
    ds.head(d) = pd.dHdp;
    ds.segment(d, d) = -pd.dHdx;
    ds(2 * d) = pp.dot(pd.dHdp);
    if (opts.with_arc) {
      // Independent route: F(x, xdot) through a fresh dual-point solve.
      const DualPoint dp = dual_point(m, xx, pd.dHdp);
      ds(2 * d + 1) = dp.p.dot(pd.dHdp);
    }
  };

  Trajectory traj;
  traj.tau = tau;
  auto observer = [&](double t, Eigen::VectorXd& s) -> bool {
    const Eigen::VectorXd xx = s.head(d);
    Eigen::VectorXd pp = s.segment(d, d);
    traj.max_h_drift = std::max(traj.max_h_drift, std::abs(hamiltonian(m, xx, pp)));
    bool mutated = false;
    if (opts.project_to_level && t > 0.0) {
      const Eigen::VectorXd u = pp.normalized();
      s.segment(d, d) = figuratrix_radius(m, xx, u) * u;
      pp = s.segment(d, d);
      mutated = true;
    }
    if (opts.with_samples) {
      traj.t.push_back(t);
      traj.x.push_back(xx);
      traj.p.push_back(pp);
      traj.arc_support.push_back(s(2 * d));
      if (opts.with_arc) traj.arc_finsler.push_back(s(2 * d + 1));
    }
    return mutated;
  };

  integrate_dopri5(rhs, 0.0, tau, state, OdeOptions{opts.rtol, opts.atol, 0.0, 400000},
                   observer);
  if (!opts.with_samples) {
    traj.t = {0.0, tau};
    traj.x = {y, state.head(d)};
    traj.p = {p0, state.segment(d, d)};
    traj.arc_support = {0.0, state(2 * d)};
    if (opts.with_arc) traj.arc_finsler = {0.0, state(2 * d + 1)};
  }
  traj.steps_accepted = static_cast<long>(traj.t.size()) - 1;
  if (traj.max_h_drift > 1e-9 * scale)
    throw NumericalError("flow: level-set drift above tolerance");
  return traj;
}

std::vector<GeodesicSolution> uniqueness_scan(const ModelSpec& m,
                                              const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& x, int n_seeds,
                                              const ShootOptions& opts) {
  const int d = m.d;
  if ((x - y).norm() == 0.0)
    throw ConfigError("uniqueness_scan: coincident endpoints");
  if (n_seeds <= 0) n_seeds = (d == 2) ? 16 : 40;

  // Primary seed: the dual point of the chord direction.
  const DualPoint dual = dual_point(m, y, x - y);
  double H;
  Eigen::VectorXd v0;
  hamiltonian_and_grad_p(m, y, dual.p, H, v0);
  const double tau0 = (x - y).norm() / v0.norm();
  const Eigen::VectorXd theta0 = direction_to_angles(dual.p.normalized());

  std::vector<Eigen::VectorXd> seeds;
  {
    Eigen::VectorXd z0(d);
    z0.head(d - 1) = theta0;
    z0(d - 1) = tau0;
    seeds.push_back(z0);
  }
  for (int j = 1; j < n_seeds; ++j) {
    Eigen::VectorXd u;
    if (d == 2) {
      const double ang = theta0(0) + 2.0 * std::numbers::pi * j / n_seeds;
      u = Eigen::Vector2d(std::cos(ang), std::sin(ang));
    } else {
      // Fibonacci sphere for d = 3; Halton angles beyond.
      if (d == 3) {
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        const double zc = 1.0 - (2.0 * j + 1.0) / n_seeds;
        const double rr = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const double ang = 2.0 * std::numbers::pi * j / golden;
        u = Eigen::Vector3d(rr * std::cos(ang), rr * std::sin(ang), zc);
      } else {
        Eigen::VectorXd ang =
            2.0 * std::numbers::pi * halton_point(static_cast<std::uint64_t>(j), d - 1);
        u = angles_to_direction(ang, d);
      }
    }
    Eigen::VectorXd z(d);
    z.head(d - 1) = direction_to_angles(u);
    Eigen::VectorXd dHdp_u;
    const Eigen::VectorXd pu = figuratrix_radius(m, y, u) * u;
    hamiltonian_and_grad_p(m, y, pu, H, dHdp_u);
    z(d - 1) = (x - y).norm() / dHdp_u.norm();
    seeds.push_back(z);
  }

  std::vector<NewtonResult> found;
  for (const auto& z : seeds) {
    const auto nr = shoot_newton(m, y, x, z, opts);
    if (!nr) continue;
    bool duplicate = false;
    for (const auto& prev : found) {
      if ((prev.p0 - nr->p0).lpNorm<Eigen::Infinity>() <= opts.cluster_tol &&
          std::abs(prev.z(d - 1) - nr->z(d - 1)) <= opts.cluster_tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) found.push_back(*nr);
  }

  std::vector<GeodesicSolution> sols;
  sols.reserve(found.size());
  for (const auto& nr : found) sols.push_back(build_solution(m, y, x, nr, opts));
  std::sort(sols.begin(), sols.end(),
            [](const GeodesicSolution& a, const GeodesicSolution& b) { return a.dF < b.dF; });

  int minimizers = 0;
  for (const auto& s : sols)
    if (!sols.empty() && s.dF <= sols.front().dF + 1e-8) ++minimizers;
  for (auto& s : sols) {
    s.n_minimizing_clusters = minimizers;
    s.unique = (minimizers == 1);
  }
  return sols;
}

GeodesicSolution shoot(const ModelSpec& m, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& x, const ShootOptions& opts) {
  std::vector<GeodesicSolution> sols = uniqueness_scan(m, y, x, opts.n_seeds, opts);
  if (sols.empty())
    throw GeometryError("shoot: no geodesic found from any scan seed");
  GeodesicSolution sol = std::move(sols.front());
  if (opts.run_conjugate_check) conjugate_check(m, sol);
  return sol;
}

ConjugateReport conjugate_check(const ModelSpec& m, GeodesicSolution& sol) {
  ConjugateReport rep;
  const std::vector<JacobiSample> js = propagate_jacobi(m, sol.traj);
  rep.t.reserve(js.size());
  rep.bordered.reserve(js.size());
  for (const auto& s : js) {
    double H;
    Eigen::VectorXd v_t;
    hamiltonian_and_grad_p(m, s.x, s.p, H, v_t);
    rep.t.push_back(s.t);
    rep.bordered.push_back(bordered_det(sol.v_y, v_t, s.X));
  }
  for (std::size_t i = 1; i < rep.bordered.size(); ++i) {
    if (rep.bordered[i] <= 0.0) {
      rep.conjugate_free = false;
      const double b0 = rep.bordered[i - 1], b1 = rep.bordered[i];
      const double t0 = rep.t[i - 1], t1 = rep.t[i];
      rep.first_zero_time = (b0 > 0.0) ? t0 + (t1 - t0) * b0 / (b0 - b1) : t0;
      break;
    }
  }

  // Independent endpoint-map cross-check at tau: finite-difference Jacobian
  // with respect to the figuratrix angles.
  const int d = m.d;
  const Eigen::VectorXd theta = direction_to_angles(sol.p_y.normalized());
  Eigen::MatrixXd Jend(d, d - 1);
  for (int j = 0; j < d - 1; ++j) {
    const double eps = 1e-6;
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += eps;
    tm(j) -= eps;
    const Eigen::VectorXd ep =
        flow_endpoint(m, sol.y, momentum_of_angles(m, sol.y, tp), sol.tau, 1e-10, 1e-12);
    const Eigen::VectorXd em =
        flow_endpoint(m, sol.y, momentum_of_angles(m, sol.y, tm), sol.tau, 1e-10, 1e-12);
    Jend.col(j) = (ep - em) / (2.0 * eps);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jend);
  rep.endpoint_min_singular_value = svd.singularValues().minCoeff();
  const bool fd_nondegenerate =
      rep.endpoint_min_singular_value > 1e-6 * (1.0 + (sol.x - sol.y).norm());
  rep.verdicts_agree = (fd_nondegenerate == rep.conjugate_free);

  sol.conjugate_free = rep.conjugate_free;
  sol.first_conjugate_time = rep.first_zero_time;
  return rep;
}

}  // namespace latgreen
