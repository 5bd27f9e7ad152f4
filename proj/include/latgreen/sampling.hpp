#pragma once

#include <Eigen/Dense>

namespace latgreen {

// Halton low-discrepancy sequence, one prime base per coordinate.
inline double halton(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t n = i + 1; n > 0; n /= base) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(n % base);
  }
  return r;
}

inline Eigen::VectorXd halton_point(std::uint64_t i, Eigen::Index d) {
  static constexpr std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                             23, 29, 31, 37, 41, 43, 47, 53};
  Eigen::VectorXd x(d);
  for (Eigen::Index j = 0; j < d; ++j)
    x(j) = halton(i, primes[j % (sizeof(primes) / sizeof(primes[0]))]);
  return x;
}

struct SampleBox {
  Eigen::VectorXd lo, hi;
};

inline Eigen::VectorXd sample_in_box(const SampleBox& box, std::uint64_t i) {
  const Eigen::VectorXd u = halton_point(i, box.lo.size());
  return box.lo.array() + u.array() * (box.hi - box.lo).array();
}

}  // namespace latgreen
