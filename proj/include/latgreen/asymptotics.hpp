#pragma once

#include <Eigen/Dense>
#include <vector>

#include "latgreen/geodesics.hpp"
#include "latgreen/jacobi.hpp"
#include "latgreen/model.hpp"

namespace latgreen {

enum class AsymptoticRoute { GJacobi, Bordered };

struct AsymptoticEstimate {
  double value{0.0};
  double dF{0.0};
  double prefactor{0.0};  // C in value = C exp(-dF/h) (2 pi dF/h)^{-(d-1)/2}
  double delta{1.0};
  double bordered{0.0};   // det [[0,-v_y^T],[v_x, X(tau)]]
  AsymptoticRoute route{AsymptoticRoute::GJacobi};
  double tau{0.0};
  double pv_x{0.0}, pv_y{0.0};   // <p,v> at the two ends
  double detG_x{0.0}, detG_y{0.0};
  bool near_coincident_warning{false};  // 0 < dF < 10 h: decay regime not reached
};

// Geometry of one solved two-point problem; every h-dependent estimate is an
// O(1) evaluation on top of it.
struct GreenGeometry {
  int d{0};
  GeodesicSolution sol;
  Dispersal disp;
  double bordered_tau{0.0};
  double pv_x{0.0}, pv_y{0.0};
  double detG_x{0.0}, detG_y{0.0};
  double prefactor{0.0};
};

// Shoot y -> x, refuse non-unique or conjugate geometries, and cache the
// endpoint tensors, the dispersal factor and the bordered determinant.
GreenGeometry green_geometry(const ModelSpec& m, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, const ShootOptions& opts = {});

AsymptoticEstimate green_leading(const GreenGeometry& geo, double h);
AsymptoticEstimate green_leading(const ModelSpec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double h);

// value = exp(-dF/h) (h/2 pi)^{(d-1)/2} bordered^{s/2}; s = -1 is the
// calibrated sign (the +1 variant is kept for the calibration test).
AsymptoticEstimate green_leading_bordered(const GreenGeometry& geo, double h, int s = -1);
AsymptoticEstimate green_leading_bordered(const ModelSpec& m, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y, double h, int s = -1);

struct OzValues {
  double ti1{0.0}, ti2{0.0};            // full values at spacing h
  double prefactor_ti1{0.0};            // |grad_p H|^{(d-3)/2} / sqrt(det Hpp_perp)
  double prefactor_ti2{0.0};            // sqrt(det G) / <p, grad_p H>
  double F{0.0};                        // F(z)
  double znorm{0.0};
};

// Both translation-invariant closed forms, leading order only.
OzValues green_oz(const ModelSpec& m, const Eigen::VectorXd& z, double h);

enum class OracleKind { Auto, Spectral, Lattice };

struct SweepRow {
  int n{0};
  double h{0.0};
  double dF{0.0};
  double oracle{0.0};
  double asymptotic{0.0};
  double ratio{0.0};  // oracle / asymptotic
  double delta{0.0};
  double bordered{0.0};
};

// Solve the geometry once, then compare the leading estimate against the
// selected oracle on h_n = 2^{-n}, n in [n_min, n_max].
std::vector<SweepRow> convergence_sweep(const ModelSpec& m, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y, int n_min, int n_max,
                                        OracleKind oracle = OracleKind::Auto,
                                        int threads = 1,
                                        double oracle_target = 1e-8);

}  // namespace latgreen
