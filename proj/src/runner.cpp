#include "latgreen/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "latgreen/angles.hpp"
#include "latgreen/asymptotics.hpp"
#include "latgreen/errors.hpp"
#include "latgreen/finsler.hpp"
#include "latgreen/geodesics.hpp"
#include "latgreen/hamiltonian.hpp"
#include "latgreen/lattice_oracle.hpp"
#include "latgreen/run_config.hpp"
#include "latgreen/sampling.hpp"
#include "latgreen/spectral_oracle.hpp"

namespace latgreen {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec(const Eigen::VectorXd& v, const char* sep = " ") {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += fmt17(v(i));
  }
  return s;
}

std::string report_header(const RunConfig& cfg) {
  return "# config_hash=" + hash_hex(cfg.hash) + " seed=" + std::to_string(cfg.seed) + "\n";
}

void write_artifact(const RunOptions& opt, const std::string& name,
                    const std::string& text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  const fs::path path = fs::path(opt.out_dir) / name;
  std::ofstream f(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!f) throw ConfigError("cannot write artifact '" + path.string() + "'");
  f << text;
  if (!f.good()) throw ConfigError("short write on artifact '" + path.string() + "'");
}

SampleBox hypothesis_box(const RunConfig& cfg) {
  SampleBox box;
  box.lo = cfg.x.cwiseMin(cfg.y).array() - 4.0;
  box.hi = cfg.x.cwiseMax(cfg.y).array() + 4.0;
  return box;
}

RunConfig load(const RunOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_config(opt.config_path);
  if (opt.seed_override) cfg.seed = *opt.seed_override;
  return cfg;
}

int cmd_check(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  const HypothesisReport rep = check_hypotheses(cfg.model, hypothesis_box(cfg), 2000);
  std::string text = report_header(cfg);
  for (const auto& c : rep.checks) {
    text += "check=" + c.name + " pass=" + (c.pass ? "1" : "0") +
            " worst=" + fmt17(c.worst) + " at=" + fmt_vec(c.worst_x) + " " + c.detail +
            "\n";
  }
  text += "inf_dpp=" + fmt17(rep.inf_dpp) + "\n";
  text += "sup_dpp=" + fmt17(rep.sup_dpp) + "\n";
  text += std::string("all_pass=") + (rep.all_pass ? "1" : "0") + "\n";
  write_artifact(opt, "check.txt", text);
  out << text;
  return rep.all_pass ? 0 : 3;
}

int cmd_finsler(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  require_hypotheses(cfg.model, hypothesis_box(cfg), 500);
  const int d = cfg.model.d;
  const Eigen::VectorXd& x = cfg.y;

  std::string text = report_header(cfg);
  for (int i = 1; i <= d; ++i) text += "u" + std::to_string(i) + ",";
  text += "F,lambda,";
  for (int i = 1; i <= d; ++i) text += "p" + std::to_string(i) + ",";
  text += "detG,maria1,maria2\n";

  for (int s = 0; s < 64; ++s) {
    const std::uint64_t idx = cfg.seed + static_cast<std::uint64_t>(s);
    Eigen::VectorXd u(d);
    if (d == 2) {
      const double ang = 2.0 * std::numbers::pi * halton(idx, 2);
      u << std::cos(ang), std::sin(ang);
    } else {
      Eigen::VectorXd ang = halton_point(idx, d - 1);
      ang(0) *= 2.0 * std::numbers::pi;
      for (int i = 1; i < d - 1; ++i) ang(i) = (ang(i) - 0.5) * std::numbers::pi;
      u = angles_to_direction(ang, d);
    }
    const FinslerTensor ft = finsler_tensor(cfg.model, x, u);
    const DualPoint dp = dual_point(cfg.model, x, u);
    const AppendixBResiduals ab = verify_appendix_b(cfg.model, x, u);
    std::string row;
    for (int i = 0; i < d; ++i) row += fmt17(u(i)) + ",";
    row += fmt17(ft.F) + "," + fmt17(dp.lambda) + ",";
    for (int i = 0; i < d; ++i) row += fmt17(ft.Fv(i)) + ",";
    row += fmt17(ft.G.determinant()) + "," + fmt17(ab.maria1) + "," + fmt17(ab.maria2) + "\n";
    text += row;
  }
  write_artifact(opt, "finsler.csv", text);

  out << report_header(cfg);
  for (int axis = 0; axis < d; ++axis) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, axis);
    out << "F_axis" << axis + 1 << "=" << fmt17(finsler_norm(cfg.model, x, e)) << "\n";
  }
  out << "F_diagonal=" << fmt17(finsler_norm(cfg.model, x, Eigen::VectorXd::Ones(d)))
      << "\n"
      << "rows=64\n";
  return 0;
}

std::string describe_solutions(const std::vector<GeodesicSolution>& sols) {
  std::string text;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    text += "solution=" + std::to_string(i) + " p_y=" + fmt_vec(sols[i].p_y) +
            " tau=" + fmt17(sols[i].tau) + " dF=" + fmt17(sols[i].dF) + "\n";
  }
  return text;
}

int cmd_geodesic(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  require_hypotheses(cfg.model, hypothesis_box(cfg), 500);
  std::vector<GeodesicSolution> sols =
      uniqueness_scan(cfg.model, cfg.y, cfg.x, 0, ShootOptions{});
  if (sols.empty()) throw GeometryError("no geodesic found between the configured points");
  if (sols.front().n_minimizing_clusters > 1) {
    out << report_header(cfg) << describe_solutions(sols);
    throw GeometryError("minimizing geodesic is not unique (solutions listed above)");
  }
  GeodesicSolution& sol = sols.front();
  const ConjugateReport rep = conjugate_check(cfg.model, sol);
  if (!rep.conjugate_free) {
    out << report_header(cfg) << describe_solutions(sols);
    throw GeometryError("conjugate point at flight time " + fmt17(rep.first_zero_time));
  }

  const int d = cfg.model.d;
  std::string csv = report_header(cfg) + "t,";
  for (int i = 1; i <= d; ++i) csv += "x" + std::to_string(i) + ",";
  for (int i = 1; i <= d; ++i) csv += "p" + std::to_string(i) + ",";
  csv += "support_arc,finsler_arc\n";
  for (std::size_t k = 0; k < sol.traj.t.size(); ++k) {
    csv += fmt17(sol.traj.t[k]) + ",";
    for (int i = 0; i < d; ++i) csv += fmt17(sol.traj.x[k](i)) + ",";
    for (int i = 0; i < d; ++i) csv += fmt17(sol.traj.p[k](i)) + ",";
    csv += fmt17(sol.traj.arc_support[k]) + "," + fmt17(sol.traj.arc_finsler[k]) + "\n";
  }
  write_artifact(opt, "geodesic.csv", csv);

  std::string text = report_header(cfg);
  text += "tau=" + fmt17(sol.tau) + "\n";
  text += "dF=" + fmt17(sol.dF) + "\n";
  text += "dF_integral_f=" + fmt17(sol.dF_integral_f) + "\n";
  text += "p_y=" + fmt_vec(sol.p_y) + "\n";
  text += "v_y=" + fmt_vec(sol.v_y) + "\n";
  text += "p_x=" + fmt_vec(sol.p_x) + "\n";
  text += "v_x=" + fmt_vec(sol.v_x) + "\n";
  text += "max_h_drift=" + fmt17(sol.traj.max_h_drift) + "\n";
  text += "steps=" + std::to_string(sol.traj.steps_accepted) + "\n";
  text += std::string("unique=") + (sol.unique ? "1" : "0") + "\n";
  text += std::string("conjugate_free=") + (sol.conjugate_free ? "1" : "0") + "\n";
  text += "bordered_tau=" + fmt17(rep.bordered.back()) + "\n";
  out << text;
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  require_hypotheses(cfg.model, hypothesis_box(cfg), 500);
  const double h = std::ldexp(1.0, -cfg.eval_n);
  const GreenGeometry geo = green_geometry(cfg.model, cfg.x, cfg.y);
  const AsymptoticEstimate est = green_leading(geo, h);
  const AsymptoticEstimate estb = green_leading_bordered(geo, h, -1);

  std::string text = report_header(cfg);
  text += "config_hash=" + hash_hex(cfg.hash) + "\n";
  text += "n=" + std::to_string(cfg.eval_n) + "\n";
  text += "h=" + fmt17(h) + "\n";
  text += "route=G-Jacobi\n";
  text += "value=" + fmt17(est.value) + "\n";
  text += "dF=" + fmt17(est.dF) + "\n";
  text += "prefactor=" + fmt17(est.prefactor) + "\n";
  text += "delta=" + fmt17(est.delta) + "\n";
  text += "bordered=" + fmt17(est.bordered) + "\n";
  text += "tau=" + fmt17(est.tau) + "\n";
  text += "pv_x=" + fmt17(est.pv_x) + "\n";
  text += "pv_y=" + fmt17(est.pv_y) + "\n";
  text += "detG_x=" + fmt17(est.detG_x) + "\n";
  text += "detG_y=" + fmt17(est.detG_y) + "\n";
  text += std::string("near_coincident=") + (est.near_coincident_warning ? "1" : "0") +
          "\n";
  text += "value_bordered=" + fmt17(estb.value) + "\n";
  write_artifact(opt, "evaluate.txt", text);
  out << text;
  if (est.near_coincident_warning)
    out << "warning: dF < 10 h, the asymptotic decay regime is not reached\n";
  return 0;
}

int cmd_oracle(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  require_hypotheses(cfg.model, hypothesis_box(cfg), 500);
  const double h = std::ldexp(1.0, -cfg.eval_n);
  const bool ti = is_translation_invariant(cfg.model);
  OracleKind kind = cfg.oracle;
  if (kind == OracleKind::Auto) kind = ti ? OracleKind::Spectral : OracleKind::Lattice;

  std::string text = report_header(cfg);
  text += "n=" + std::to_string(cfg.eval_n) + "\nh=" + fmt17(h) + "\n";

  if (kind == OracleKind::Spectral) {
    const Eigen::VectorXd z = cfg.x - cfg.y;
    const Eigen::VectorXd pbar = spectral_tilt(cfg.model, z);
    const int nq = quadrature_refine(cfg.model, z, h, pbar);
    const SpectralValue sv = green_spectral(cfg.model, z, h, pbar, nq);
    text += "oracle=spectral\n";
    text += "value=" + fmt17(sv.value) + "\n";
    text += "nodes_per_dim=" + std::to_string(sv.n) + "\n";
    text += "imag_residual=" + fmt17(sv.imag_residual) + "\n";
    text += "denom_margin=" + fmt17(sv.denom_margin) + "\n";
    text += "pbar=" + fmt_vec(pbar) + "\n";
  } else {
    const Box box = choose_box(cfg.model, cfg.x, cfg.y, h, cfg.oracle_target);
    const Eigen::VectorXd pbar = lattice_tilt(cfg.model, box, h, cfg.x - cfg.y);
    const BoxOperator op = assemble(cfg.model, box, h, pbar);
    const GreenColumn col = green_column(op, grid_key(cfg.y, h));
    const std::int64_t row = op.index_of(grid_key(cfg.x, h));
    if (row < 0) throw ConfigError("oracle: query point outside the box");
    text += "oracle=lattice\n";
    text += "value=" + fmt17(col.values(row)) + "\n";
    text += "sites=" + std::to_string(box.site_count()) + "\n";
    text += "box_lo=";
    for (int i = 0; i < box.dim(); ++i)
      text += (i ? " " : "") + std::to_string(box.lo(i));
    text += "\nbox_hi=";
    for (int i = 0; i < box.dim(); ++i)
      text += (i ? " " : "") + std::to_string(box.hi(i));
    text += "\n";
    text += std::string("tilted=") + (op.tilted ? "1" : "0") + "\n";
    text += "pbar=" + fmt_vec(op.pbar) + "\n";
    text += "residual=" + fmt17(col.residual) + "\n";
    if (cfg.oracle_column) {
      std::string csv = report_header(cfg);
      for (int i = 1; i <= box.dim(); ++i) csv += "k" + std::to_string(i) + ",";
      csv += "value\n";
      for (std::int64_t r = 0; r < op.rows(); ++r) {
        const SiteKey k = op.site_of(r);
        for (int i = 0; i < box.dim(); ++i) csv += std::to_string(k(i)) + ",";
        csv += fmt17(col.values(r)) + "\n";
      }
      write_artifact(opt, "oracle.csv", csv);
      text += "column_csv=oracle.csv\n";
    }
  }
  write_artifact(opt, "oracle.txt", text);
  out << text;
  return 0;
}

int cmd_oz(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  require_hypotheses(cfg.model, hypothesis_box(cfg), 500);
  const double h = std::ldexp(1.0, -cfg.eval_n);
  const Eigen::VectorXd z = cfg.x - cfg.y;
  const OzValues oz = green_oz(cfg.model, z, h);
  const double spectral = green_spectral_auto(cfg.model, z, h);

  std::string text = report_header(cfg);
  text += "h=" + fmt17(h) + "\n";
  text += "z=" + fmt_vec(z) + "\n";
  text += "F=" + fmt17(oz.F) + "\n";
  text += "prefactor_ti1=" + fmt17(oz.prefactor_ti1) + "\n";
  text += "prefactor_ti2=" + fmt17(oz.prefactor_ti2) + "\n";
  text += "ti1=" + fmt17(oz.ti1) + "\n";
  text += "ti2=" + fmt17(oz.ti2) + "\n";
  text += "spectral=" + fmt17(spectral) + "\n";
  text += "ti1_over_ti2=" + fmt17(oz.ti1 / oz.ti2) + "\n";
  text += "spectral_over_ti1=" + fmt17(spectral / oz.ti1) + "\n";
  write_artifact(opt, "oz.txt", text);
  out << text;
  return 0;
}

int cmd_compare(const RunConfig& cfg, const RunOptions& opt, std::ostream& out) {
  require_hypotheses(cfg.model, hypothesis_box(cfg), 500);
  const std::vector<SweepRow> rows =
      convergence_sweep(cfg.model, cfg.x, cfg.y, cfg.sweep_n_min, cfg.sweep_n_max,
                        cfg.oracle, opt.threads, cfg.oracle_target);

  std::string csv = report_header(cfg) + "n,h,dF,oracle,asymptotic,ratio,delta,bordered\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.n) + "," + fmt17(r.h) + "," + fmt17(r.dF) + "," +
           fmt17(r.oracle) + "," + fmt17(r.asymptotic) + "," + fmt17(r.ratio) + "," +
           fmt17(r.delta) + "," + fmt17(r.bordered) + "\n";
  }
  write_artifact(opt, "compare.csv", csv);

  std::string text = report_header(cfg);
  bool decreasing = true;
  double log_shrink = 0.0;
  int steps = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double err = std::abs(rows[i].ratio - 1.0);
    text += "n=" + std::to_string(rows[i].n) + " ratio=" + fmt17(rows[i].ratio) +
            " err=" + fmt17(err);
    if (i > 0) {
      const double prev = std::abs(rows[i - 1].ratio - 1.0);
      const double shrink = prev / std::max(err, 1e-300);
      text += " shrink=" + fmt17(shrink);
      if (err >= prev) decreasing = false;
      log_shrink += std::log(std::max(shrink, 1e-300));
      ++steps;
    }
    text += "\n";
  }
  // the window is applied to the mean shrink rate across the sweep;
  // individual steps wobble with the next-order corrections
  const double mean_shrink = steps > 0 ? std::exp(log_shrink / steps) : 0.0;
  const bool in_window = steps > 0 && mean_shrink >= cfg.rate_lo && mean_shrink <= cfg.rate_hi;
  const bool pass = decreasing && in_window;
  text += std::string("monotone_decreasing=") + (decreasing ? "1" : "0") + "\n";
  text += "mean_shrink=" + fmt17(mean_shrink) + "\n";
  text += "rate_window=[" + fmt17(cfg.rate_lo) + "," + fmt17(cfg.rate_hi) + "]\n";
  text += std::string("rate_in_window=") + (in_window ? "1" : "0") + "\n";
  text += std::string(pass ? "PASS" : "FAIL") + "\n";
  write_artifact(opt, "compare_summary.txt", text);
  out << text;
  return pass ? 0 : 1;
}

}  // namespace

int run_subcommand(const std::string& command, const RunOptions& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  if (command == "check") return cmd_check(cfg, opt, out);
  if (command == "finsler") return cmd_finsler(cfg, opt, out);
  if (command == "geodesic") return cmd_geodesic(cfg, opt, out);
  if (command == "evaluate") return cmd_evaluate(cfg, opt, out);
  if (command == "oracle") return cmd_oracle(cfg, opt, out);
  if (command == "oz") return cmd_oz(cfg, opt, out);
  if (command == "compare") return cmd_compare(cfg, opt, out);
  throw ConfigError("unknown subcommand '" + command + "'");
}

int run_cli(const std::string& command, const RunOptions& opt, std::ostream& out,
            std::ostream& err) {
  try {
    return run_subcommand(command, opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace latgreen
