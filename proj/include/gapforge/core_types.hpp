#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gapforge/error.hpp"

namespace gapforge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Default absolute root tolerance, in reduced units.
inline constexpr double kDefaultTol = 1e-10;

/// The four energies of the Fermi-surface model. Only ratios matter, so no
/// unit scale is fixed.
///
/// Temperature 0 is the zero-temperature limit (beta() == inf) and
/// temperature +inf is the infinite-temperature limit (beta() == 0). Fermi
/// factors and tanh terms take their exact limits in both cases.
struct ModelParams {
  double lambda_B = 0.0;
  double lambda_M = 0.0;
  double mu = 0.0;
  double temperature = 0.0;

  static ModelParams from_temperature(double lambda_B, double lambda_M, double mu, double temperature) {
    return {lambda_B, lambda_M, mu, temperature};
  }
  static ModelParams from_beta(double lambda_B, double lambda_M, double mu, double beta);

  double beta() const noexcept;
  bool zero_temperature() const noexcept { return temperature == 0.0; }
  bool infinite_temperature() const noexcept { return temperature == kInfinity; }

  /// beta * q / 2; undefined at T = 0.
  double reduced(double q) const;
};

/// Model parameters in units of 2T.
struct ReducedParams {
  double lambda_B_bar = 0.0;
  double lambda_M_bar = 0.0;
  double mu_bar = 0.0;
};

/// Returns params unchanged when mu >= 0 and T >= 0, throws otherwise.
ModelParams validate(const ModelParams& params);

/// Throws ZeroTemperature at T = 0.
ReducedParams to_reduced(const ModelParams& params);

/// Real Bogoliubov coefficients, c = cos(phi), s = sin(phi).
struct BogoliubovCoefficients {
  double c = 1.0;
  double s = 0.0;
  double phi = 0.0;
};

enum class PhaseLabel { PureMeanField, MixedLower, MixedUpper, Tangent };

/// Fig. 5 style areas of the (lambda_B, lambda_M) plane.
enum class Area { APlus, BPlus, CPlus, AMinus, BMinus, None };

/// Number of roots of the pairing-energy equation.
enum class RootClass { NoSolution, Unique, Two };

struct RegionLabel {
  Area area = Area::None;
  RootClass roots = RootClass::NoSolution;
};

struct GapSolution {
  double delta_M = 0.0;
  double delta_B = 0.0;  // canonical non-negative representative
  double w_bar = 0.0;
  BogoliubovCoefficients coeffs;
  PhaseLabel phase = PhaseLabel::PureMeanField;
  double residual = 0.0;
  /// -delta_B is an equally valid solution (true whenever delta_B > 0).
  bool delta_B_sign_free = false;

  bool mixed() const noexcept { return phase != PhaseLabel::PureMeanField; }
  /// mu + delta_M, the shifted single-particle energy at the Fermi surface.
  double mean_field_energy(const ModelParams& params) const noexcept { return params.mu + delta_M; }
};

struct SolveReport {
  ModelParams params;
  std::vector<GapSolution> solutions;  // pure mean-field first
  RegionLabel region;
  int multiplicity = 0;
  /// Why pairing roots were dropped, one line per dropped root.
  std::vector<std::string> notes;
};

/// Checks the invariants every emitted solution must satisfy and returns one
/// message per violation. The mixing-angle bound |c| >= sqrt(2)/2 only holds
/// when mu + delta_M >= 0, so it is checked only when `check_mixing_angle` is
/// set.
std::vector<std::string> check_invariants(const GapSolution& solution, const ModelParams& params,
                                          double tol = 1e-9, bool check_mixing_angle = false);

const char* to_string(PhaseLabel phase) noexcept;
const char* to_string(Area area) noexcept;
const char* to_string(RootClass roots) noexcept;

}  // namespace gapforge
