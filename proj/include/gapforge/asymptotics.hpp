#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapforge/core_types.hpp"

namespace gapforge {

/// Limiting regimes of the Fermi-surface system:
///  IA  lambda_B > 0, W - mu >> 2T (tanh -> 1)
///  IB  lambda_B > 0, W - mu << 2T (tanh x -> x)
///  IIA lambda_B < 0, mu - W >> 2T
///  IIB lambda_B < 0, mu - W << 2T
enum class Regime { IA, IB, IIA, IIB };

const char* to_string(Regime regime) noexcept;

/// ">>" and "<<" are read as a ratio of at least this factor.
inline constexpr double kDefaultWindowFactor = 10.0;

struct RegimeSolution {
  Regime regime = Regime::IA;
  double w_bar = 0.0;
  double delta_M = 0.0;
  double delta_B = 0.0;  // NaN when the closed form has a negative radicand
  bool valid = false;
  /// Ratio by which the asymptotic condition holds; valid needs >= window factor.
  double validity_margin = 0.0;
};

RegimeSolution regime_IA(const ModelParams& params, double window_factor = kDefaultWindowFactor);
RegimeSolution regime_IB(const ModelParams& params, double window_factor = kDefaultWindowFactor);
RegimeSolution regime_IIA(const ModelParams& params, double window_factor = kDefaultWindowFactor);
RegimeSolution regime_IIB(const ModelParams& params, double window_factor = kDefaultWindowFactor);
RegimeSolution regime_solution(Regime regime, const ModelParams& params,
                               double window_factor = kDefaultWindowFactor);

/// Relative tolerance for comparing a regime's closed form with the exact
/// solver: 1e-3 for type A, 5e-2 for type B.
double regime_tolerance(Regime regime) noexcept;

struct OracleComparison {
  std::string quantity;
  double numeric = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RegimeVerification {
  RegimeSolution closed_form;
  std::optional<GapSolution> numeric;  // mixed solution nearest in W
  std::vector<OracleComparison> rows;
  bool pass = false;
};

/// Compares the closed form of `regime` with solve_all. Throws
/// PreconditionFailed when the regime's sign conditions fail or its validity
/// window is empty at these parameters.
RegimeVerification verify_regime(Regime regime, const ModelParams& params, double tolerance = 0.0,
                                 double window_factor = kDefaultWindowFactor);

}  // namespace gapforge
