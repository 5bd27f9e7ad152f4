#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>

#include "latgreen/asymptotics.hpp"
#include "latgreen/model.hpp"

namespace latgreen {

// Parsed and validated run configuration.  Grid points are stored as integer
// numerators over 2^N, so x = x_num / 2^N is exact in double precision.
struct RunConfig {
  ModelSpec model;
  int N{0};  // base grid exponent, h_N = 2^{-N}
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> x_num, y_num;
  Eigen::VectorXd x, y;
  int sweep_n_min{2};
  int sweep_n_max{5};
  int eval_n{5};  // spacing exponent used by evaluate/oracle/oz
  OracleKind oracle{OracleKind::Auto};
  double rate_lo{1.5};
  double rate_hi{2.6};
  double oracle_target{1e-8};
  bool oracle_column{false};  // emit the whole Green column as CSV
  std::uint64_t seed{0};
  std::uint64_t hash{0};  // FNV-1a of the raw config bytes
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t v);

}  // namespace latgreen
