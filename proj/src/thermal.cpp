#include "gapforge/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "numerics.hpp"

namespace gapforge {

BogoliubovCoefficients bogoliubov_from_gaps(double omega_eff, double delta_B) {
  if (omega_eff == 0.0 && delta_B == 0.0) {
    fail(ErrorCode::ZeroEnergy, "omega_eff = delta_B = 0 gives a vanishing quasi-particle energy");
  }
  const double phi = 0.5 * std::atan2(delta_B, omega_eff);
  return {std::cos(phi), std::sin(phi), phi};
}

ModeState ModeState::make(double p, double omega_eff, double delta_B) {
  ModeState m;
  m.p = p;
  m.omega_eff = omega_eff;
  m.delta_B = delta_B;
  m.w_bar = std::hypot(omega_eff, delta_B);
  if (m.w_bar > 0.0) m.coeffs = bogoliubov_from_gaps(omega_eff, delta_B);
  return m;
}

double occupation(const ModeState& mode, const ModelParams& params) {
  const double beta = params.beta();
  const double e = mode.w_bar - params.mu;
  const double c2 = mode.coeffs.c * mode.coeffs.c;
  const double s2 = mode.coeffs.s * mode.coeffs.s;
  return c2 * detail::fermi(beta, e) + s2 * detail::fermi(beta, -e);
}

double pairing_amplitude(const ModeState& mode, const ModelParams& params) {
  return mode.coeffs.c * mode.coeffs.s * detail::thermal_tanh(params.beta(), mode.w_bar - params.mu);
}

ModeTable::ModeTable(std::vector<ModeState> modes, ModelParams params, double match_tol)
    : modes_(std::move(modes)), params_(params), match_tol_(match_tol) {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].p < 0.0) fail(ErrorCode::InvalidArgument, "mode table stores p >= 0 only");
    if (i > 0 && !(modes_[i].p > modes_[i - 1].p)) {
      fail(ErrorCode::InvalidArgument, "mode momenta must be strictly increasing");
    }
  }
  occupation_.reserve(modes_.size());
  pairing_.reserve(modes_.size());
  for (const auto& m : modes_) {
    occupation_.push_back(occupation(m, params_));
    pairing_.push_back(pairing_amplitude(m, params_));
  }
}

std::size_t ModeTable::index_of(double abs_p) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), abs_p - match_tol_,
                             [](const ModeState& m, double v) { return m.p < v; });
  if (it == modes_.end() || std::abs(it->p - abs_p) > match_tol_) {
    std::ostringstream msg;
    msg << "momentum " << abs_p << " is not a grid point";
    fail(ErrorCode::MomentumOffGrid, msg.str());
  }
  return static_cast<std::size_t>(it - modes_.begin());
}

double ModeTable::occupation_at(double p) const { return occupation_[index_of(std::abs(p))]; }

double ModeTable::pairing_at(double p) const {
  const double v = pairing_[index_of(std::abs(p))];
  return p < 0.0 ? -v : v;
}

double quartic_expectation(const ModeTable& table, double q, double q_prime, double p, double p_prime) {
  // Validates all four momenta up front, even when a delta vanishes.
  const double occ_p = table.occupation_at(p);
  const double occ_pp = table.occupation_at(p_prime);
  const double pair_q = table.pairing_at(q);
  const double pair_p = table.pairing_at(p);
  (void)table.occupation_at(q);
  (void)table.occupation_at(q_prime);

  auto same = [](double a, double b) { return a == b; };
  double out = 0.0;
  if (same(q, -q_prime) && same(p, -p_prime)) out += pair_q * pair_p;
  if (same(p, q) && same(p_prime, q_prime)) out -= occ_p * occ_pp;
  if (same(p, q_prime) && same(p_prime, q)) out += occ_p * occ_pp;
  return out;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

void check_quadrature(const SmearingQuadrature& quad) {
  if (!(quad.half_width > 0.0) || quad.outer_points < 3 || quad.inner_points < 3 || !(quad.ridge_sigmas > 0.0)) {
    fail(ErrorCode::InvalidArgument, "invalid smearing quadrature settings");
  }
}

}  // namespace

ScalingFit smearing_scaling_check(const Profile& profile, const Profile& test_fn, std::span<const double> kappas,
                                  const SmearingQuadrature& quad) {
  check_quadrature(quad);
  if (kappas.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two kappa values");
  const auto [kmin, kmax] = std::minmax_element(kappas.begin(), kappas.end());
  if (!(*kmin > 0.0) || *kmax / *kmin < 100.0) {
    fail(ErrorCode::InvalidArgument, "kappa values must be positive and span at least two decades");
  }

  auto h = [&](double p) { return test_fn(p) * profile(p); };
  const auto outer = linspace(-quad.half_width, quad.half_width, quad.outer_points);
  const double h_outer = outer[1] - outer[0];
  std::vector<double> h_values(outer.size());
  std::transform(outer.begin(), outer.end(), h_values.begin(), h);

  ScalingFit fit;
  fit.kappas.assign(kappas.begin(), kappas.end());
  std::vector<double> inner_f(quad.inner_points);
  std::vector<double> outer_f(outer.size());
  for (double kappa : kappas) {
    // exp(-2 kappa u^2) has standard deviation 1 / (2 sqrt(kappa)).
    const double sigma = 0.5 / std::sqrt(kappa);
    const double reach = quad.ridge_sigmas * sigma;
    const auto u = linspace(-reach, reach, quad.inner_points);
    const double du = u[1] - u[0];
    for (std::size_t i = 0; i < outer.size(); ++i) {
      if (h_values[i] == 0.0) {
        outer_f[i] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j < u.size(); ++j) {
        inner_f[j] = std::exp(-2.0 * kappa * u[j] * u[j]) * h(-outer[i] + u[j]);
      }
      outer_f[i] = h_values[i] * trapezoid(inner_f, du);
    }
    fit.values.push_back(trapezoid(outer_f, h_outer));
  }

  for (std::size_t i = 0; i < fit.values.size(); ++i) {
    const double v = fit.values[i];
    if (!std::isfinite(v) || !(v > 0.0)) fail(ErrorCode::FitFailed, "smeared integral is not positive");
  }
  std::vector<std::size_t> order(fit.kappas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fit.kappas[a] < fit.kappas[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (fit.values[order[i]] > fit.values[order[i - 1]] * (1.0 + 1e-12)) {
      fail(ErrorCode::FitFailed, "smeared integral is not decreasing in kappa; quadrature under-resolved");
    }
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.values.size());
  for (std::size_t i = 0; i < fit.values.size(); ++i) {
    const double x = std::log(fit.kappas[i]);
    const double y = std::log(fit.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::vector<double> smeared_pairing_term(const Profile& pairing, const Profile& test_fn,
                                         std::span<const double> kappas, const SmearingQuadrature& quad) {
  check_quadrature(quad);
  const auto p = linspace(-quad.half_width, quad.half_width, quad.outer_points);
  const double dp = p[1] - p[0];
  std::vector<double> f(p.size());
  std::vector<double> out;
  out.reserve(kappas.size());
  for (double kappa : kappas) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double partner = -p[i];
      const double gauss = std::exp(-kappa * (p[i] + partner) * (p[i] + partner));
      f[i] = gauss * test_fn(p[i]) * pairing(p[i]);
    }
    const double single = trapezoid(f, dp);
    out.push_back(single * single);
  }
  return out;
}

}  // namespace gapforge
