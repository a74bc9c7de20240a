#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cylflow {

// Error taxonomy. config_error: bad setup (unsupported cylinder, grid
// mismatch, invalid scenario). domain_error: data violates a mathematical
// precondition (non-positive graph radius). input_error: malformed or
// insufficient user input. solver_error: an iteration failed to converge.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};
struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a time step produces a non-positive graph radius.
struct blowup_error : std::runtime_error {
  double tau;
  std::size_t node;
  double value;
  blowup_error(double tau_, std::size_t node_, double value_)
      : std::runtime_error("graph radius became non-positive during step"),
        tau(tau_), node(node_), value(value_) {}
};

namespace constants {
inline constexpr double sqrt2 = 1.4142135623730951;
inline constexpr double sqrt8 = 2.8284271247461903;
inline constexpr double pi = 3.141592653589793;
// Gaussian area of the round cylinder R^2 x S^1(sqrt(2)), sqrt(2*pi/e).
inline constexpr double gaussian_area_cylinder = 1.5203469010662807;
// Quantized eigenvalue -1/sqrt(8).
inline constexpr double quantized_eigenvalue = -0.3535533905932738;
}  // namespace constants

// Static parallel loop over [0, n). Iterations must be independent; every
// iteration writes only its own outputs, so results are bitwise identical
// regardless of thread count.
template <class Body>
void parallel_for(std::ptrdiff_t n, const Body& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace cylflow
