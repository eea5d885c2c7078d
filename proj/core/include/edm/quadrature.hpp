#pragma once

#include <functional>
#include <stdexcept>

namespace edm {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive Simpson integration of f over [a, b] (b < a integrates
/// backwards). Throws QuadratureError if the recursion depth is exhausted
/// before the error estimate drops below tol, or if f is not finite.
[[nodiscard]] double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                      double tol = 1e-8, int max_depth = 48);

}  // namespace edm
