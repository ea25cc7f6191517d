#pragma once

#include <cmath>
#include <limits>

namespace gapforge::detail {

/// 1 / (1 + exp(beta * e)) with exact beta = 0 and beta = inf limits.
inline double fermi(double beta, double e) {
  if (beta == 0.0) return 0.5;
  if (std::isinf(beta)) return e > 0.0 ? 0.0 : (e < 0.0 ? 1.0 : 0.5);
  const double y = beta * e;
  if (y > 0.0) {
    const double t = std::exp(-y);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(y));
}

/// tanh(beta * e / 2) with exact limits.
inline double thermal_tanh(double beta, double e) {
  if (beta == 0.0) return 0.0;
  if (std::isinf(beta)) return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
  return std::tanh(0.5 * beta * e);
}

/// 1 - tanh(y) for y >= 0 without cancellation.
inline double one_minus_tanh(double y) {
  const double t = std::exp(-2.0 * y);
  return 2.0 * t / (1.0 + t);
}

/// sech^2(y), stable for large |y|.
inline double sech2(double y) {
  const double t = std::exp(-2.0 * std::abs(y));
  return 4.0 * t / ((1.0 + t) * (1.0 + t));
}

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace gapforge::detail
