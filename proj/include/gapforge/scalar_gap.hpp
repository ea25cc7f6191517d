#pragma once

#include <vector>

#include "gapforge/core_types.hpp"

namespace gapforge {

/// A sign change of the pairing-energy residual in the reduced variable
/// x = beta W / 2.
struct RootBracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

struct PairingRoot {
  double w_bar = 0.0;
  double x = 0.0;  // beta W / 2; equal to w_bar at T = 0 where it is undefined
  bool tangent = false;
  double residual = 0.0;  // |W - lambda_B tanh(beta (W - mu) / 2)|
};

struct RootSearchSettings {
  double tol = kDefaultTol;
  int subdivisions = 512;
};

/// Residual x - lambda_B_bar tanh(x - mu_bar) of the reduced pairing equation.
double pairing_residual(double x, const ReducedParams& reduced);

/// All W > 0 solving W = lambda_B tanh(beta (W - mu) / 2), increasing.
///
/// Searches x in (mu_bar, lambda_B_bar] for lambda_B > 0 and in
/// (0, min(mu_bar, |lambda_B_bar|)) for lambda_B < 0. Sign changes are
/// bisected and polished with one Newton step. Without a sign change, a grid
/// minimum with |f| < sqrt(tol) scale is refined and reported as a tangent
/// root; so is a root pair whose separating minimum is within tol of zero.
/// Throws ZeroCoupling for lambda_B = 0.
std::vector<PairingRoot> pairing_energy_roots(const ModelParams& params, const RootSearchSettings& settings = {});

/// Sign-change brackets found by the grid scan (exposed for diagnostics).
std::vector<RootBracket> bracket_pairing_roots(const ModelParams& params, const RootSearchSettings& settings = {});

/// Delta_M on a mixed branch. With c^2, s^2 eliminated through the
/// Bogoliubov conditions and tanh(beta (W - mu) / 2) = W / lambda_B, the
/// mean-field equation is linear in Delta_M:
///   Delta_M = lambda_M (lambda_B - mu) / (lambda_B + lambda_M).
/// Throws SingularDenominator or ConstraintViolation (sign or |Delta_M| bound).
double mean_field_gap_given_w(double w_bar, const ModelParams& params);

/// +sqrt(W^2 - (mu + Delta_M)^2); throws NotAdmissible when the radicand is
/// below -tol.
double recover_delta_B(double w_bar, double delta_M, const ModelParams& params, double tol = kDefaultTol);

/// Unique root of Delta (1 + exp(beta Delta)) = 2 lambda_M, by bisection on
/// [-2|lambda_M|, 2|lambda_M|].
double pure_mean_field(const ModelParams& params, double tol = 1e-14);

struct SolveOptions {
  double tol = kDefaultTol;
  /// Drop mixed solutions with mu + Delta_M < 0.
  bool require_nonnegative_mean_field_energy = false;
};

/// The pure mean-field solution plus every admissible mixed solution.
SolveReport solve_all(const ModelParams& params, const SolveOptions& options = {});

/// Max violation of the scalar gap equations for a solution.
double constraint_residual(const GapSolution& solution, const ModelParams& params);

struct EquilibriumPoint {
  double lambda_B_bar = 0.0;
  double mu_e_bar = 0.0;
  double x_e = 0.0;
};

/// Tangency of the pairing equation: mu_e = -acosh(sqrt(lb)) + lb tanh(acosh(sqrt(lb))),
/// x_e = lb tanh(acosh(sqrt(lb))). Roots exist in pairs for mu_bar < mu_e,
/// merge at mu_bar = mu_e and vanish above it. Throws DomainError for lb < 1.
EquilibriumPoint equilibrium_mu(double lambda_B_bar);

/// lambda_B / 2; throws NotApplicable for lambda_B <= 0.
double critical_temperature(const ModelParams& params);

}  // namespace gapforge
