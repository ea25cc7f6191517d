#include "gapforge/scalar_gap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gapforge/phase_diagram.hpp"
#include "gapforge/thermal.hpp"
#include "numerics.hpp"

namespace gapforge {

namespace {

double pairing_slope(double x, const ReducedParams& r) {
  return 1.0 - r.lambda_B_bar * detail::sech2(x - r.mu_bar);
}

struct SearchWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = true;
  bool hi_open = false;
};

SearchWindow search_window(const ReducedParams& r) {
  if (r.lambda_B_bar > 0.0) return {r.mu_bar, r.lambda_B_bar, true, false};
  // The residual is positive at the upper end, so an exact zero there is a root
  // that has merged with it in double precision.
  return {0.0, std::min(r.mu_bar, -r.lambda_B_bar), true, false};
}

// Location of the minimum of the residual on x > mu_bar, when it exists.
bool interior_minimum(const ReducedParams& r, double* x_min) {
  if (!(r.lambda_B_bar > 1.0)) return false;
  *x_min = r.mu_bar + std::acosh(std::sqrt(r.lambda_B_bar));
  return true;
}

double bisect(double lo, double hi, double f_lo, const ReducedParams& r) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid))) break;
    const double f_mid = pairing_residual(mid, r);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  // One Newton polish, kept only when it stays in the bracket and helps.
  const double fx = pairing_residual(x, r);
  const double slope = pairing_slope(x, r);
  if (slope != 0.0) {
    const double candidate = x - fx / slope;
    if (candidate >= lo && candidate <= hi && std::abs(pairing_residual(candidate, r)) < std::abs(fx)) {
      x = candidate;
    }
  }
  return x;
}

struct ScanResult {
  std::vector<RootBracket> brackets;
  std::vector<double> exact_zeros;
  double min_abs_f = kInfinity;
  double x_at_min = 0.0;
};

ScanResult scan_window(const ReducedParams& r, const SearchWindow& w, int subdivisions) {
  ScanResult out;
  if (!(w.hi > w.lo)) return out;
  std::vector<double> nodes(static_cast<std::size_t>(subdivisions) + 1);
  for (int i = 0; i <= subdivisions; ++i) {
    nodes[static_cast<std::size_t>(i)] = w.lo + (w.hi - w.lo) * static_cast<double>(i) / subdivisions;
  }
  nodes.back() = w.hi;
  double x_min = 0.0;
  if (interior_minimum(r, &x_min) && x_min > w.lo && x_min < w.hi) {
    nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), x_min), x_min);
  }
  std::vector<double> f(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = pairing_residual(nodes[i], r);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const bool endpoint_open = (i == 0 && w.lo_open) || (i + 1 == nodes.size() && w.hi_open);
    if (endpoint_open) continue;
    if (std::abs(f[i]) < out.min_abs_f) {
      out.min_abs_f = std::abs(f[i]);
      out.x_at_min = nodes[i];
    }
    if (f[i] == 0.0) out.exact_zeros.push_back(nodes[i]);
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if ((f[i] < 0.0 && f[i + 1] > 0.0) || (f[i] > 0.0 && f[i + 1] < 0.0)) {
      out.brackets.push_back({nodes[i], nodes[i + 1], f[i], f[i + 1]});
    }
  }
  return out;
}

std::vector<PairingRoot> zero_temperature_roots(const ModelParams& p) {
  // tanh -> sign: W = lambda_B sign(W - mu).
  if (p.lambda_B > 0.0 && p.lambda_B > p.mu) return {{p.lambda_B, kInfinity, false, 0.0}};
  if (p.lambda_B < 0.0 && -p.lambda_B < p.mu) return {{-p.lambda_B, kInfinity, false, 0.0}};
  return {};
}

}  // namespace

double pairing_residual(double x, const ReducedParams& r) {
  const double y = x - r.mu_bar;
  if (y > 0.0 && r.lambda_B_bar > 0.0) return (x - r.lambda_B_bar) + r.lambda_B_bar * detail::one_minus_tanh(y);
  if (y < 0.0 && r.lambda_B_bar < 0.0) return (x + r.lambda_B_bar) - r.lambda_B_bar * detail::one_minus_tanh(-y);
  return x - r.lambda_B_bar * std::tanh(y);
}

std::vector<RootBracket> bracket_pairing_roots(const ModelParams& params, const RootSearchSettings& settings) {
  validate(params);
  if (params.lambda_B == 0.0) fail(ErrorCode::ZeroCoupling, "lambda_B = 0 forces the trivial pairing branch");
  if (params.zero_temperature() || params.infinite_temperature()) return {};
  const auto r = to_reduced(params);
  return scan_window(r, search_window(r), settings.subdivisions).brackets;
}

std::vector<PairingRoot> pairing_energy_roots(const ModelParams& params, const RootSearchSettings& settings) {
  validate(params);
  if (params.lambda_B == 0.0) fail(ErrorCode::ZeroCoupling, "lambda_B = 0 forces the trivial pairing branch");
  if (!(settings.tol > 0.0) || settings.subdivisions < 1) fail(ErrorCode::InvalidArgument, "invalid root settings");
  if (params.zero_temperature()) return zero_temperature_roots(params);
  if (params.infinite_temperature()) return {};

  const auto r = to_reduced(params);
  const auto window = search_window(r);
  const auto scan = scan_window(r, window, settings.subdivisions);
  const double scale = std::max(1.0, std::abs(r.lambda_B_bar));
  const double two_t = 2.0 * params.temperature;

  std::vector<double> xs = scan.exact_zeros;
  for (const auto& b : scan.brackets) xs.push_back(bisect(b.lo, b.hi, b.f_lo, r));
  std::sort(xs.begin(), xs.end());

  auto make_root = [&](double x, bool tangent) {
    return PairingRoot{two_t * x, x, tangent, two_t * std::abs(pairing_residual(x, r))};
  };

  double x_min = 0.0;
  if (r.lambda_B_bar > 0.0 && interior_minimum(r, &x_min) && x_min > window.lo && x_min <= window.hi) {
    const double f_min = pairing_residual(x_min, r);
    // Near-degenerate pairs and near misses are one band, sqrt(tol) wide on both
    // sides. f is convex on x > mu_bar, so whatever was found here is that pair.
    if (std::abs(f_min) < std::sqrt(settings.tol) * scale) return {make_root(x_min, true)};
  }

  std::vector<PairingRoot> roots;
  roots.reserve(xs.size());
  for (double x : xs) {
    if (x > 0.0) roots.push_back(make_root(x, false));
  }
  return roots;
}

double mean_field_gap_given_w(double w_bar, const ModelParams& params) {
  if (!(w_bar > 0.0)) fail(ErrorCode::InvalidArgument, "w_bar must be > 0");
  const double lm = params.lambda_M;
  if (lm == 0.0) return 0.0;
  const double den = params.lambda_B + lm;
  if (std::abs(den) <= 1e-15 * (std::abs(params.lambda_B) + std::abs(lm))) {
    fail(ErrorCode::SingularDenominator, "lambda_B + lambda_M = 0");
  }
  const double delta_M = lm * (params.lambda_B - params.mu) / den;
  if (delta_M * lm < 0.0) {
    std::ostringstream msg;
    msg << "sign(Delta_M) != sign(lambda_M) (Delta_M = " << delta_M << ")";
    fail(ErrorCode::ConstraintViolation, msg.str());
  }
  if (std::abs(delta_M) > 2.0 * std::abs(lm) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "|Delta_M| > 2|lambda_M| (Delta_M = " << delta_M << ")";
    fail(ErrorCode::ConstraintViolation, msg.str());
  }
  return delta_M;
}

double recover_delta_B(double w_bar, double delta_M, const ModelParams& params, double tol) {
  if (!(w_bar > 0.0)) fail(ErrorCode::InvalidArgument, "w_bar must be > 0");
  const double e = params.mu + delta_M;
  const double radicand = w_bar * w_bar - e * e;
  if (radicand < -tol * std::max(1.0, w_bar * w_bar)) {
    std::ostringstream msg;
    msg << "W^2 - (mu + Delta_M)^2 = " << radicand << " < 0";
    fail(ErrorCode::NotAdmissible, msg.str());
  }
  return std::sqrt(std::max(0.0, radicand));
}

double pure_mean_field(const ModelParams& params, double tol) {
  validate(params);
  const double lm = params.lambda_M;
  if (lm == 0.0) return 0.0;
  const double beta = params.beta();
  if (beta == 0.0) return lm;
  if (std::isinf(beta)) return lm > 0.0 ? 0.0 : 2.0 * lm;

  // Delta (1 + exp(beta Delta)) is strictly increasing, so the root is unique.
  auto h = [&](double d) { return d * (1.0 + std::exp(beta * d)) - 2.0 * lm; };
  double lo = -2.0 * std::abs(lm);
  double hi = 2.0 * std::abs(lm);
  for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(lm)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double constraint_residual(const GapSolution& sol, const ModelParams& params) {
  const double beta = params.beta();
  const double e = sol.mean_field_energy(params);
  if (!sol.mixed()) {
    if (std::isinf(beta)) return std::abs(sol.w_bar - std::abs(e));  // T = 0 branch is a limit
    const double mf = std::abs(0.5 * sol.delta_M - params.lambda_M * detail::fermi(beta, sol.delta_M));
    return std::max(mf, std::abs(sol.w_bar - std::abs(e)));
  }
  ModeState mode;
  mode.omega_eff = e;
  mode.delta_B = sol.delta_B;
  mode.w_bar = sol.w_bar;
  mode.coeffs = sol.coeffs;
  const double mf = std::abs(0.5 * sol.delta_M - params.lambda_M * occupation(mode, params));
  const double pair = std::abs(sol.w_bar - params.lambda_B * detail::thermal_tanh(beta, sol.w_bar - params.mu)) /
                      std::max(1.0, std::abs(params.lambda_B));
  const double spectrum = std::abs(sol.w_bar - std::hypot(e, sol.delta_B)) / std::max(1.0, sol.w_bar);
  return std::max({mf, pair, spectrum});
}

SolveReport solve_all(const ModelParams& params, const SolveOptions& options) {
  SolveReport report;
  report.params = validate(params);

  GapSolution pure;
  pure.delta_M = pure_mean_field(params);
  pure.delta_B = 0.0;
  pure.w_bar = std::abs(params.mu + pure.delta_M);
  pure.phase = PhaseLabel::PureMeanField;
  pure.residual = constraint_residual(pure, params);
  report.solutions.push_back(pure);

  std::vector<PairingRoot> roots;
  if (params.lambda_B == 0.0) {
    report.notes.push_back("lambda_B = 0: pairing equation admits only Delta_B = 0");
  } else {
    roots = pairing_energy_roots(params, {options.tol, 512});
  }

  std::vector<GapSolution> mixed;
  for (const auto& root : roots) {
    std::ostringstream where;
    where << "root W = " << root.w_bar << ": ";
    try {
      GapSolution sol;
      sol.w_bar = root.w_bar;
      sol.delta_M = mean_field_gap_given_w(root.w_bar, params);
      sol.delta_B = recover_delta_B(root.w_bar, sol.delta_M, params, options.tol);
      sol.delta_B_sign_free = sol.delta_B > 0.0;
      if (options.require_nonnegative_mean_field_energy && sol.mean_field_energy(params) < 0.0) {
        report.notes.push_back(where.str() + "mu + Delta_M < 0 excluded by filter");
        continue;
      }
      sol.coeffs = bogoliubov_from_gaps(sol.mean_field_energy(params), sol.delta_B);
      sol.phase = root.tangent ? PhaseLabel::Tangent : PhaseLabel::MixedLower;
      sol.residual = constraint_residual(sol, params);
      mixed.push_back(sol);
    } catch (const Error& e) {
      report.notes.push_back(where.str() + to_string(e.code()) + ": " + e.what());
    }
  }
  if (mixed.size() == 2) mixed[1].phase = PhaseLabel::MixedUpper;
  report.solutions.insert(report.solutions.end(), mixed.begin(), mixed.end());
  report.multiplicity = static_cast<int>(mixed.size());
  report.region.area = classify_area(params);
  report.region.roots = mixed_root_class(roots);
  return report;
}

EquilibriumPoint equilibrium_mu(double lambda_B_bar) {
  if (!(lambda_B_bar >= 1.0) || !std::isfinite(lambda_B_bar)) {
    fail(ErrorCode::DomainError, "equilibrium chemical potential needs lambda_B_bar >= 1");
  }
  const double theta = std::acosh(std::sqrt(lambda_B_bar));
  // lb tanh(theta) with cosh(theta) = sqrt(lb).
  const double x_e = std::sqrt(lambda_B_bar * (lambda_B_bar - 1.0));
  return {lambda_B_bar, x_e - theta, x_e};
}

double critical_temperature(const ModelParams& params) {
  if (!(params.lambda_B > 0.0)) {
    fail(ErrorCode::NotApplicable, "no critical temperature formula for lambda_B <= 0");
  }
  return 0.5 * params.lambda_B;
}

}  // namespace gapforge
