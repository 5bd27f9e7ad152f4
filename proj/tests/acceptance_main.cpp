// End-to-end acceptance runner: one line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here and nowhere else.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "latgreen/asymptotics.hpp"
#include "latgreen/finsler.hpp"
#include "latgreen/geodesics.hpp"
#include "latgreen/hamiltonian.hpp"
#include "latgreen/jacobi.hpp"
#include "latgreen/lattice_oracle.hpp"
#include "latgreen/sampling.hpp"
#include "latgreen/spectral_oracle.hpp"
#include "latgreen/symbol.hpp"
#include "test_models.hpp"

using namespace latgreen;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
double g_worst_drift = 0.0;  // collected over the criterion-8 flights

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, bool pass, const std::string& detail, double secs) {
  std::printf("criterion %2d: %s (%s, %.2f s)\n", id, pass ? "PASS" : "FAIL",
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Fixed-step RK4 on the raw Hamiltonian field; used as the independent
// reference for the variational-equation cross-check.
void rk4_flow(const ModelSpec& m, Eigen::VectorXd& x, Eigen::VectorXd& p, double tau,
              int steps) {
  const double dt = tau / steps;
  Eigen::VectorXd k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
  auto rhs = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& pp,
                 Eigen::VectorXd& dx, Eigen::VectorXd& dp) {
    const PhaseDerivs d = phase_derivs(m, xx, pp);
    dx = d.dHdp;
    dp = -d.dHdx;
  };
  for (int i = 0; i < steps; ++i) {
    rhs(x, p, k1x, k1p);
    rhs(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, k2x, k2p);
    rhs(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, k3x, k3p);
    rhs(x + dt * k3x, p + dt * k3p, k4x, k4p);
    x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    p += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
  }
}

void criterion_1_closed_form_distances() {
  const auto t0 = Clock::now();
  const ModelSpec m = model_a();
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  const double axis_err = std::abs(shoot(m, y, vec2(1, 0)).dF - kAxisRadiusA);
  const double diag_err = std::abs(shoot(m, y, vec2(1, 1)).dF - kDiagDistA);
  const double secs = seconds_since(t0);
  const bool pass = axis_err <= 1e-10 && diag_err <= 1e-9 && secs < 1.0;
  report(1, pass, fmt("axis err %.2e <= 1e-10, diagonal err %.2e <= 1e-9", axis_err,
                      diag_err),
         secs);
}

void criterion_2_oracle_cross_agreement() {
  const auto t0 = Clock::now();
  const ModelSpec m = model_a();
  const double h = 0.125;
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  double worst = 0.0;
  int count = 0;
  bool ok = true;
  std::string note;
  try {
    for (int k1 = -16; k1 <= 16; ++k1) {
      for (int k2 = -16; k2 <= 16; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        if (k1 * k1 + k2 * k2 > 256) continue;
        const Eigen::VectorXd z = vec2(h * k1, h * k2);
        const double spec = green_spectral_auto(m, z, h);
        const double lat = green_value(m, z, y, h, 1e-8);
        worst = std::max(worst, std::abs(lat / spec - 1.0));
        ++count;
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  const double secs = seconds_since(t0);
  const bool pass = ok && worst <= 1e-6 && secs < 30.0;
  if (note.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d displacements, worst rel diff %.2e <= 1e-6",
                  count, worst);
    note = buf;
  }
  report(2, pass, note, secs);
}

void criterion_3_stationary_phase_consistency() {
  const auto t0 = Clock::now();
  const ModelSpec ma = model_a();
  double worst_pref = 0.0;
  for (const Eigen::VectorXd& z : {vec2(1, 0), vec2(2, 0), vec2(1, 1), vec2(3, 2)}) {
    const OzValues oz = green_oz(ma, z, 0.125);
    // the exponential is common, so the value ratio is the prefactor ratio
    worst_pref = std::max(worst_pref, std::abs(oz.ti1 / oz.ti2 - 1.0));
  }
  const ModelSpec mb = model_b();
  double worst_maria = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = (6.0 * halton_point(i, 2).array() - 3.0).matrix();
    const double th = 2.0 * std::numbers::pi * halton(i + 200, 5);
    const AppendixBResiduals r =
        verify_appendix_b(mb, x, vec2(std::cos(th), std::sin(th)));
    worst_maria = std::max({worst_maria, r.maria1, r.maria2});
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_pref <= 1e-8 && worst_maria <= 1e-7 && secs < 5.0;
  report(3, pass,
         fmt("prefactor mismatch %.2e <= 1e-8, identity residual %.2e <= 1e-7",
             worst_pref, worst_maria),
         secs);
}

void criterion_4_bordered_calibration() {
  const auto t0 = Clock::now();
  const ModelSpec m = model_a();
  const double h = 0.125;
  const GreenGeometry geo = green_geometry(m, vec2(1, 0), vec2(0, 0));
  const double closed = green_oz(m, vec2(1, 0), h).ti1;
  const double minus = green_leading_bordered(geo, h, -1).value;
  const double plus = green_leading_bordered(geo, h, +1).value;
  const double err_minus = std::abs(minus / closed - 1.0);
  const double err_flip = std::abs(plus / minus - geo.bordered_tau);
  const double secs = seconds_since(t0);
  const bool pass = err_minus <= 1e-6 && err_flip <= 1e-9 * geo.bordered_tau;
  report(4, pass,
         fmt("exponent -1/2 off by %.2e <= 1e-6, sign flip = det to %.2e", err_minus,
             err_flip),
         secs);
}

bool sweep_errors(const std::vector<SweepRow>& rows, std::vector<double>& errs) {
  errs.clear();
  for (const SweepRow& r : rows) errs.push_back(std::abs(r.ratio - 1.0));
  for (std::size_t i = 1; i < errs.size(); ++i)
    if (errs[i] >= errs[i - 1]) return false;
  return true;
}

void criterion_5_convergence_uniform() {
  const auto t0 = Clock::now();
  const auto rows =
      convergence_sweep(model_a(), vec2(1, 0), vec2(0, 0), 2, 5, OracleKind::Spectral);
  std::vector<double> errs;
  const bool decreasing = sweep_errors(rows, errs);
  double logsum = 0.0;
  for (std::size_t i = 1; i < errs.size(); ++i) logsum += std::log(errs[i - 1] / errs[i]);
  const double rate = std::exp(logsum / (errs.size() - 1));
  const double secs = seconds_since(t0);
  const bool pass = decreasing && rate >= 1.5 && rate <= 2.6 && secs < 60.0;
  report(5, pass,
         fmt("errors decreasing, mean shrink %.3f in [1.5, 2.6], final %.2e", rate,
             errs.back()),
         secs);
}

void criterion_6_convergence_modulated() {
  const auto t0 = Clock::now();
  const auto rows =
      convergence_sweep(model_b(), vec2(1, 0), vec2(0, 0), 2, 5, OracleKind::Lattice);
  std::vector<double> errs;
  const bool decreasing = sweep_errors(rows, errs);
  const double secs = seconds_since(t0);
  const bool pass = decreasing && errs.back() <= 0.1 && secs < 300.0;
  report(6, pass, fmt("errors monotone decreasing, final %.2e <= 0.1", errs.back()),
         secs);
}

void criterion_7_dispersal() {
  const auto t0 = Clock::now();
  const ModelSpec ma = model_a();
  const double delta_a =
      green_geometry(ma, vec2(1, 0), vec2(0, 0)).disp.delta;
  const ModelSpec mb = model_b();
  const double far = std::abs(
      green_geometry(mb, vec2(8, 0), vec2(0, 0)).disp.delta - 1.0);
  const double near = std::abs(
      green_geometry(mb, vec2(2, 0), vec2(0, 0)).disp.delta - 1.0);
  const double ratio = far / near;
  const double secs = seconds_since(t0);
  const bool pass =
      std::abs(delta_a - 1.0) <= 1e-6 && ratio >= 1.8 && ratio <= 2.3;
  report(7, pass,
         fmt("flat delta off by %.2e <= 1e-6, quartered-distance ratio %.3f in "
             "[1.8, 2.3]",
             std::abs(delta_a - 1.0), ratio),
         secs);
}

void criterion_8_jacobi_integrity() {
  const auto t0 = Clock::now();
  double worst_symp = 0.0;
  double worst_drift = 0.0;
  double closed_err = 0.0;
  double fd_err = 0.0;
  for (const ModelSpec& m : {model_a(), model_b()}) {
    for (const Eigen::VectorXd& x : {vec2(1, 0), vec2(1, 1), vec2(2, 1)}) {
      const GeodesicSolution sol = shoot(m, vec2(0, 0), x);
      worst_drift = std::max(worst_drift, sol.traj.max_h_drift);
      const auto samples = propagate_jacobi(m, sol.traj);
      for (const JacobiSample& s : samples)
        worst_symp = std::max(
            worst_symp,
            (s.X.transpose() * s.P - s.P.transpose() * s.X).norm());
      if (is_translation_invariant(m)) {
        const Eigen::MatrixXd hpp = phase_derivs(m, sol.y, sol.p_y).Hpp;
        for (const JacobiSample& s : samples)
          closed_err = std::max(closed_err, (s.X - s.t * hpp).norm() /
                                                (1.0 + s.t * hpp.norm()));
      }
    }
  }
  {
    const ModelSpec m = model_b();
    const GeodesicSolution sol = shoot(m, vec2(0, 0), vec2(1, 0));
    const Eigen::MatrixXd X = propagate_jacobi(m, sol.traj).back().X;
    const double eps = 1e-6;
    Eigen::MatrixXd Xfd(2, 2);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd xp = sol.y, pp = sol.p_y, xm = sol.y, pm = sol.p_y;
      pp(i) += eps;
      pm(i) -= eps;
      rk4_flow(m, xp, pp, sol.tau, 1500);
      rk4_flow(m, xm, pm, sol.tau, 1500);
      Xfd.col(i) = (xp - xm) / (2 * eps);
    }
    fd_err = (X - Xfd).norm() / Xfd.norm();
  }
  g_worst_drift = worst_drift;
  const double secs = seconds_since(t0);
  const bool pass = worst_symp <= 1e-9 && fd_err <= 1e-4 && closed_err <= 1e-8;
  report(8, pass,
         fmt("symplectic %.2e <= 1e-9, fd cross-check %.2e <= 1e-4, flat closed "
             "form %.2e <= 1e-8",
             worst_symp, fd_err, closed_err),
         secs);
}

void criterion_9_symbol_identity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int trial = 0;
  for (const ModelSpec& m : {model_a(), model_b()}) {
    for (double h : {0.5, 0.25}) {
      for (int rep = 0; rep < 4; ++rep, ++trial) {
        LatticeSite x;
        x.k.resize(2);
        x.k << rep - 2, 1 - rep;
        x.h = h;
        LatticeFunction f;
        for (int a = -2; a <= 2; ++a)
          for (int b = -2; b <= 2; ++b) {
            Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k(2);
            k << x.k(0) + a, x.k(1) + b;
            f.values.emplace_back(
                k, 2.0 * halton(trial * 25 + (a + 2) * 5 + b + 2, 3) - 1.0);
          }
        worst = std::max(worst, verify_matrix_symbol_identity(m, h, x, f));
      }
    }
  }
  const double secs = seconds_since(t0);
  report(9, worst <= 1e-12, fmt("matrix vs quadrature residual %.2e <= 1e-12", worst),
         secs);
}

void criterion_10_invariants(Clock::time_point suite_start) {
  const auto t0 = Clock::now();
  const ModelSpec mb = model_b();
  bool ok = true;

  // homogeneity, evenness, triangle inequality, dual alignment
  for (int i = 0; i < 20 && ok; ++i) {
    const Eigen::VectorXd x = (6.0 * halton_point(i + 3, 2).array() - 3.0).matrix();
    const double th = 2.0 * std::numbers::pi * halton(i, 7);
    const Eigen::VectorXd v = vec2(std::cos(th), std::sin(th));
    const double f = finsler_norm(mb, x, v);
    ok = ok && std::abs(finsler_norm(mb, x, 2.5 * v) - 2.5 * f) <= 1e-10 * f;
    ok = ok && std::abs(finsler_norm(mb, x, -v) - f) <= 1e-10 * f;
    const Eigen::VectorXd w = vec2(-std::sin(th), std::cos(th));
    ok = ok && finsler_norm(mb, x, v + w) <=
                   f + finsler_norm(mb, x, w) + 1e-10;
    const DualPoint dp = dual_point(mb, x, v);
    const Eigen::VectorXd n = phase_derivs(mb, x, dp.p).dHdp;
    ok = ok && (n - dp.lambda * v).norm() <= 1e-10 * n.norm();
    ok = ok && std::abs(hamiltonian(mb, x, dp.p)) <= 1e-11 * level_scale(mb, x);
  }

  // Green-column positivity and symmetry
  {
    Box box;
    box.lo = SiteKey::Constant(2, -6);
    box.hi = SiteKey::Constant(2, 6);
    const BoxOperator op = assemble(model_a(), box, 0.25);
    SiteKey src(2);
    src << 0, 0;
    const GreenColumn col = green_column(op, src);
    for (std::int64_t row = 0; row < op.rows() && ok; ++row) {
      const SiteKey k = op.site_of(row);
      SiteKey neg = -k;
      ok = ok && col.values(row) > 0.0;
      ok = ok && std::abs(col.values(row) - col.values(op.index_of(neg))) <=
                     1e-12 * col.values(row);
    }
  }

  const double total = seconds_since(suite_start);
  const double secs = seconds_since(t0);
  const bool pass = ok && g_worst_drift <= 1e-10 && total < 600.0;
  report(10, pass,
         fmt("invariants hold, energy drift %.2e <= 1e-10, suite total %.1f s < 600 s",
             g_worst_drift, total),
         secs);
}

}  // namespace

int main() {
  const auto suite_start = Clock::now();
  criterion_1_closed_form_distances();
  criterion_2_oracle_cross_agreement();
  criterion_3_stationary_phase_consistency();
  criterion_4_bordered_calibration();
  criterion_5_convergence_uniform();
  criterion_6_convergence_modulated();
  criterion_7_dispersal();
  criterion_8_jacobi_integrity();
  criterion_9_symbol_identity();
  criterion_10_invariants(suite_start);
  std::printf("acceptance: %s (%.1f s total)\n", g_failures == 0 ? "all passed" : "FAILURES",
              seconds_since(suite_start));
  return g_failures == 0 ? 0 : 1;
}
