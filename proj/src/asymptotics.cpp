#include "gapforge/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "gapforge/scalar_gap.hpp"

namespace gapforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared algebra of the type-A regimes: W fixed at |lambda_B|, Delta_M from
// the exact linear elimination, Delta_B from W^2 = (mu + Delta_M)^2 + Delta_B^2.
void type_a_closed_form(const ModelParams& p, RegimeSolution& out) {
  const double den = p.lambda_B + p.lambda_M;
  if (den == 0.0) fail(ErrorCode::SingularDenominator, "lambda_B + lambda_M = 0");
  out.w_bar = std::abs(p.lambda_B);
  out.delta_M = p.lambda_M * (p.lambda_B - p.mu) / den;
  const double radicand = (p.lambda_B - p.mu) * (p.lambda_B + p.mu + 2.0 * p.lambda_M);
  out.delta_B = radicand >= 0.0 ? std::abs(p.lambda_B / den) * std::sqrt(radicand) : kNaN;
}

// Shared algebra of the type-B regimes (tanh x ~ x).
void type_b_closed_form(const ModelParams& p, RegimeSolution& out) {
  const double den = p.lambda_B - 2.0 * p.temperature;
  if (den == 0.0) fail(ErrorCode::SingularDenominator, "lambda_B = 2T");
  out.w_bar = p.lambda_B * p.mu / den;
  out.delta_M = p.lambda_M;
  const double e = p.mu + p.lambda_M;
  const double radicand = out.w_bar * out.w_bar - e * e;
  if (radicand < 0.0) fail(ErrorCode::NotAdmissible, "W^2 - (mu + lambda_M)^2 < 0 in the tanh x ~ x regime");
  out.delta_B = std::sqrt(radicand);
}

double ratio(double num, double den) { return den == 0.0 ? kInfinity : num / den; }

}  // namespace

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::IA: return "IA";
    case Regime::IB: return "IB";
    case Regime::IIA: return "IIA";
    case Regime::IIB: return "IIB";
  }
  return "Unknown";
}

RegimeSolution regime_IA(const ModelParams& params, double window_factor) {
  const auto p = validate(params);
  if (!(p.lambda_B > 0.0)) fail(ErrorCode::PreconditionFailed, "regime IA needs lambda_B > 0");
  RegimeSolution out;
  out.regime = Regime::IA;
  type_a_closed_form(p, out);
  out.validity_margin = ratio(out.w_bar - p.mu, 2.0 * p.temperature);
  out.valid = p.lambda_B + p.mu + 2.0 * p.lambda_M > 0.0 && out.validity_margin >= window_factor &&
              !std::isnan(out.delta_B);
  return out;
}

RegimeSolution regime_IB(const ModelParams& params, double window_factor) {
  const auto p = validate(params);
  if (!(p.lambda_B > 0.0)) fail(ErrorCode::PreconditionFailed, "regime IB needs lambda_B > 0");
  if (p.lambda_B == 2.0 * p.temperature) fail(ErrorCode::SingularDenominator, "lambda_B = 2T");
  if (!(p.lambda_B > 2.0 * p.temperature)) fail(ErrorCode::PreconditionFailed, "regime IB needs lambda_B > 2T");
  RegimeSolution out;
  out.regime = Regime::IB;
  type_b_closed_form(p, out);
  // lambda_M lambda_B / (2 (mu + lambda_M)) < T << (lambda_B - mu) / 2
  const double e = p.mu + p.lambda_M;
  const bool above_lower = e <= 0.0 || p.lambda_M * p.lambda_B / (2.0 * e) < p.temperature;
  out.validity_margin = ratio((p.lambda_B - p.mu) / 2.0, p.temperature);
  out.valid = above_lower && out.validity_margin >= window_factor;
  return out;
}

RegimeSolution regime_IIA(const ModelParams& params, double window_factor) {
  const auto p = validate(params);
  if (!(p.lambda_B < 0.0) || p.lambda_M > 0.0) {
    fail(ErrorCode::PreconditionFailed, "regime IIA needs lambda_B < 0 and lambda_M <= 0");
  }
  RegimeSolution out;
  out.regime = Regime::IIA;
  type_a_closed_form(p, out);
  out.validity_margin = ratio(p.mu - out.w_bar, 2.0 * p.temperature);
  out.valid = p.lambda_B + p.mu + 2.0 * p.lambda_M < 0.0 && out.validity_margin >= window_factor &&
              !std::isnan(out.delta_B);
  return out;
}

RegimeSolution regime_IIB(const ModelParams& params, double window_factor) {
  const auto p = validate(params);
  if (!(p.lambda_B < 0.0) || p.lambda_M > 0.0) {
    fail(ErrorCode::PreconditionFailed, "regime IIB needs lambda_B < 0 and lambda_M <= 0");
  }
  RegimeSolution out;
  out.regime = Regime::IIB;
  type_b_closed_form(p, out);
  // (mu + lambda_B) / 2 << T < lambda_B lambda_M / (2 (mu + lambda_M))
  const double e = p.mu + p.lambda_M;
  const bool below_upper = e > 0.0 && p.temperature < p.lambda_B * p.lambda_M / (2.0 * e);
  const double lower = (p.mu + p.lambda_B) / 2.0;
  out.validity_margin = lower <= 0.0 ? kInfinity : p.temperature / lower;
  out.valid = below_upper && out.validity_margin >= window_factor;
  return out;
}

RegimeSolution regime_solution(Regime regime, const ModelParams& params, double window_factor) {
  switch (regime) {
    case Regime::IA: return regime_IA(params, window_factor);
    case Regime::IB: return regime_IB(params, window_factor);
    case Regime::IIA: return regime_IIA(params, window_factor);
    case Regime::IIB: return regime_IIB(params, window_factor);
  }
  fail(ErrorCode::InvalidArgument, "unknown regime");
}

double regime_tolerance(Regime regime) noexcept {
  return regime == Regime::IA || regime == Regime::IIA ? 1e-3 : 5e-2;
}

RegimeVerification verify_regime(Regime regime, const ModelParams& params, double tolerance, double window_factor) {
  RegimeVerification out;
  try {
    out.closed_form = regime_solution(regime, params, window_factor);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotAdmissible || e.code() == ErrorCode::SingularDenominator) {
      fail(ErrorCode::PreconditionFailed, std::string("regime ") + to_string(regime) + ": " + e.what());
    }
    throw;
  }
  if (!out.closed_form.valid) {
    fail(ErrorCode::PreconditionFailed,
         std::string("regime ") + to_string(regime) + " validity window is empty at these parameters");
  }
  const double tol = tolerance > 0.0 ? tolerance : regime_tolerance(regime);

  const auto report = solve_all(params);
  for (const auto& s : report.solutions) {
    if (!s.mixed()) continue;
    if (!out.numeric || std::abs(s.w_bar - out.closed_form.w_bar) < std::abs(out.numeric->w_bar - out.closed_form.w_bar)) {
      out.numeric = s;
    }
  }

  const double floor = 1e-12 * (std::abs(params.lambda_B) + std::abs(params.lambda_M) + params.mu);
  auto compare = [&](const char* name, double numeric, double closed) {
    OracleComparison row;
    row.quantity = name;
    row.numeric = numeric;
    row.closed_form = closed;
    row.rel_error = std::abs(numeric - closed) / std::max(std::abs(closed), floor);
    row.tolerance = tol;
    row.pass = row.rel_error <= tol;
    out.rows.push_back(row);
  };
  if (out.numeric) {
    compare("w_bar", out.numeric->w_bar, out.closed_form.w_bar);
    compare("delta_M", out.numeric->delta_M, out.closed_form.delta_M);
    compare("delta_B", out.numeric->delta_B, out.closed_form.delta_B);
  } else {
    OracleComparison row;
    row.quantity = "mixed solution";
    row.rel_error = kInfinity;
    row.tolerance = tol;
    out.rows.push_back(row);
  }
  out.pass = true;
  for (const auto& r : out.rows) out.pass = out.pass && r.pass;
  return out;
}

}  // namespace gapforge
