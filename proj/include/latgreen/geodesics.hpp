#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "latgreen/finsler.hpp"
#include "latgreen/model.hpp"

namespace latgreen {

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x, p;
  std::vector<double> arc_support;  // int <p, xdot> dt up to each sample
  std::vector<double> arc_finsler;  // int F(x, xdot) dt (independent dual solve)
  double tau{0.0};
  double max_h_drift{0.0};
  long steps_accepted{0};
};

struct FlowOptions {
  double rtol{1e-10};
  double atol{1e-12};
  bool with_samples{true};
  bool with_arc{false};          // the F-route integrand costs a Newton solve per
                                 // derivative evaluation; enabled for final flights
  bool project_to_level{false};  // radial momentum rescale back onto {H=0}
};

// Hamiltonian flow from (y, p0) over [0, tau] on the zero level set.
Trajectory flow(const ModelSpec& m, const Eigen::VectorXd& y, const Eigen::VectorXd& p0,
                double tau, const FlowOptions& opts = {});

struct GeodesicSolution {
  Eigen::VectorXd y, x;
  double tau{0.0};
  Eigen::VectorXd p_y, v_y;  // momentum/velocity at y
  Eigen::VectorXd p_x, v_x;  // momentum/velocity at x
  Trajectory traj;
  double dF{0.0};            // int <p, xdot> dt
  double dF_integral_f{0.0}; // int F(q, qdot) dt, independent route
  bool unique{true};
  bool conjugate_free{true};
  double first_conjugate_time{std::numeric_limits<double>::quiet_NaN()};
  int n_minimizing_clusters{1};
};

struct ShootOptions {
  int n_seeds{0};  // 0: 16 for d=2, 40 for d>=3
  double rtol{1e-10};
  double atol{1e-12};
  int max_newton{50};
  double cluster_tol{1e-6};
  bool run_conjugate_check{true};
};

// Two-point boundary problem by Newton on (angles, flight time) with
// finite-difference Jacobian of the flow, globalized over figuratrix seeds.
GeodesicSolution shoot(const ModelSpec& m, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& x, const ShootOptions& opts = {});

// All distinct shooting solutions (clustered by initial momentum and flight
// time), sorted by Finsler length.
std::vector<GeodesicSolution> uniqueness_scan(const ModelSpec& m,
                                              const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& x, int n_seeds,
                                              const ShootOptions& opts = {});

struct ConjugateReport {
  bool conjugate_free{true};
  double first_zero_time{std::numeric_limits<double>::quiet_NaN()};
  std::vector<double> t;
  std::vector<double> bordered;  // det[[0,-v_y^T],[v(t), X(t)]] along the flight
  double endpoint_min_singular_value{0.0};  // FD cross-check at tau
  bool verdicts_agree{true};
};

// Bordered-determinant monitor along the flight plus the finite-difference
// endpoint-map cross-check; updates sol's conjugacy fields.
ConjugateReport conjugate_check(const ModelSpec& m, GeodesicSolution& sol);

}  // namespace latgreen
