#include "gapforge/core_types.hpp"

#include <cmath>
#include <sstream>

namespace gapforge {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeChemicalPotential: return "NegativeChemicalPotential";
    case ErrorCode::NegativeTemperature: return "NegativeTemperature";
    case ErrorCode::ZeroTemperature: return "ZeroTemperature";
    case ErrorCode::ZeroCoupling: return "ZeroCoupling";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::ShellBelowZero: return "ShellBelowZero";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::MomentumOffGrid: return "MomentumOffGrid";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(PhaseLabel phase) noexcept {
  switch (phase) {
    case PhaseLabel::PureMeanField: return "PureMeanField";
    case PhaseLabel::MixedLower: return "MixedLower";
    case PhaseLabel::MixedUpper: return "MixedUpper";
    case PhaseLabel::Tangent: return "Tangent";
  }
  return "Unknown";
}

const char* to_string(Area area) noexcept {
  switch (area) {
    case Area::APlus: return "APlus";
    case Area::BPlus: return "BPlus";
    case Area::CPlus: return "CPlus";
    case Area::AMinus: return "AMinus";
    case Area::BMinus: return "BMinus";
    case Area::None: return "None";
  }
  return "Unknown";
}

const char* to_string(RootClass roots) noexcept {
  switch (roots) {
    case RootClass::NoSolution: return "NoSolution";
    case RootClass::Unique: return "Unique";
    case RootClass::Two: return "Two";
  }
  return "Unknown";
}

ModelParams ModelParams::from_beta(double lambda_B, double lambda_M, double mu, double beta) {
  if (std::isnan(beta) || beta < 0.0) fail(ErrorCode::NegativeTemperature, "beta must be >= 0");
  const double temperature = beta == 0.0 ? kInfinity : (std::isinf(beta) ? 0.0 : 1.0 / beta);
  return {lambda_B, lambda_M, mu, temperature};
}

double ModelParams::beta() const noexcept {
  if (temperature == 0.0) return kInfinity;
  if (temperature == kInfinity) return 0.0;
  return 1.0 / temperature;
}

double ModelParams::reduced(double q) const {
  if (zero_temperature()) fail(ErrorCode::ZeroTemperature, "reduced variables are undefined at T = 0");
  if (infinite_temperature()) return 0.0;
  return q / (2.0 * temperature);
}

ModelParams validate(const ModelParams& params) {
  if (!std::isfinite(params.lambda_B) || !std::isfinite(params.lambda_M) || !std::isfinite(params.mu)) {
    fail(ErrorCode::InvalidArgument, "couplings and chemical potential must be finite");
  }
  if (params.mu < 0.0) fail(ErrorCode::NegativeChemicalPotential, "chemical potential must be >= 0");
  if (std::isnan(params.temperature) || params.temperature < 0.0) {
    fail(ErrorCode::NegativeTemperature, "temperature must be >= 0");
  }
  return params;
}

ReducedParams to_reduced(const ModelParams& params) {
  return {params.reduced(params.lambda_B), params.reduced(params.lambda_M), params.reduced(params.mu)};
}

std::vector<std::string> check_invariants(const GapSolution& sol, const ModelParams& params, double tol,
                                          bool check_mixing_angle) {
  std::vector<std::string> out;
  auto report = [&](const std::string& msg) { out.push_back(msg); };
  const double lm = params.lambda_M;

  const auto& cs = sol.coeffs;
  if (std::abs(cs.c * cs.c + cs.s * cs.s - 1.0) > 1e-12) report("c^2 + s^2 != 1");
  if (sol.delta_B < 0.0) report("delta_B stored negative");
  if (sol.delta_M * lm < 0.0) report("sign(delta_M) != sign(lambda_M)");
  if (std::abs(sol.delta_M) > 2.0 * std::abs(lm) * (1.0 + tol) + tol) report("|delta_M| > 2|lambda_M|");

  if (sol.mixed()) {
    const double e = sol.mean_field_energy(params);
    const double lhs = sol.w_bar * sol.w_bar;
    const double rhs = e * e + sol.delta_B * sol.delta_B;
    if (std::abs(lhs - rhs) > tol * std::max(1.0, lhs)) report("w_bar^2 != (mu + delta_M)^2 + delta_B^2");
    if (!(sol.w_bar > 0.0)) report("w_bar <= 0");
    if (sol.w_bar > std::abs(params.lambda_B) * (1.0 + tol) + tol) report("w_bar > |lambda_B|");
    if (sol.delta_B > sol.w_bar * (1.0 + tol)) report("delta_B > w_bar");
    if (sol.delta_B > 0.0 && !(sol.w_bar > e)) report("w_bar <= mu + delta_M");
    if (params.lambda_B > 0.0 && !(sol.w_bar > params.mu)) report("lambda_B > 0 but w_bar <= mu");
    if (params.lambda_B < 0.0 && !(sol.w_bar < params.mu)) report("lambda_B < 0 but w_bar >= mu");
    if (check_mixing_angle && std::abs(cs.c) < std::sqrt(0.5) - 1e-12) {
      std::ostringstream msg;
      msg << "|c| = " << std::abs(cs.c) << " < sqrt(2)/2";
      report(msg.str());
    }
  }
  return out;
}

}  // namespace gapforge
