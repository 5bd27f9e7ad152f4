#pragma once

#include <stdexcept>
#include <string>

namespace latgreen {

// Error taxonomy mirrored by the CLI exit codes (see runner.cpp).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A sampled model hypothesis failed; downstream geometry is undefined.
class HypothesisError : public std::runtime_error {
public:
  explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

// Geometry precondition failed: non-unique minimizing geodesic or a conjugate
// point on the connecting geodesic.
class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical machinery broke down (Newton divergence, step-size collapse,
// solver residual above tolerance, quadrature cap reached).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace latgreen
