#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gapforge/core_types.hpp"

namespace gapforge {

/// Coefficients satisfying c^2 - s^2 = omega_eff / W and 2cs = delta_B / W with
/// W = sqrt(omega_eff^2 + delta_B^2), using phi = atan2(delta_B, omega_eff) / 2.
///
/// For omega_eff >= 0 the angle lies in [-pi/4, pi/4] and c >= sqrt(2)/2. A
/// negative omega_eff has no representative in that window; the returned angle
/// then lies outside it and |c| < sqrt(2)/2.
BogoliubovCoefficients bogoliubov_from_gaps(double omega_eff, double delta_B);

/// One momentum mode of the diagonalized Hamiltonian.
struct ModeState {
  double p = 0.0;
  double omega_eff = 0.0;
  double delta_B = 0.0;
  double w_bar = 0.0;
  BogoliubovCoefficients coeffs;

  /// Builds a consistent mode. W = 0 (no energy, no pairing) is mapped to the
  /// unmixed coefficients (1, 0).
  static ModeState make(double p, double omega_eff, double delta_B);
};

/// {p}: c^2 f + s^2 (1 - f), f = 1 / (1 + exp(beta (W - mu))).
double occupation(const ModeState& mode, const ModelParams& params);

/// [p]: c s tanh(beta (W - mu) / 2).
double pairing_amplitude(const ModeState& mode, const ModelParams& params);

/// Modes on a symmetric momentum grid, stored for p >= 0. Negative momenta use
/// the parity extension {-p} = {p}, [-p] = -[p].
class ModeTable {
 public:
  ModeTable(std::vector<ModeState> modes, ModelParams params, double match_tol = 1e-12);

  double occupation_at(double p) const;
  double pairing_at(double p) const;
  const std::vector<ModeState>& modes() const noexcept { return modes_; }
  const ModelParams& params() const noexcept { return params_; }

 private:
  std::size_t index_of(double abs_p) const;

  std::vector<ModeState> modes_;
  std::vector<double> occupation_;
  std::vector<double> pairing_;
  ModelParams params_;
  double match_tol_;
};

/// Coefficient of <a*(q) a*(q') a(p) a(p')> on a discrete grid, where the
/// delta functions become Kronecker deltas.
double quartic_expectation(const ModeTable& table, double q, double q_prime, double p, double p_prime);

using Profile = std::function<double(double)>;

struct SmearingQuadrature {
  double half_width = 12.0;         // outer integration range [-L, L]
  std::size_t outer_points = 4001;  // trapezoid nodes on the outer axis
  std::size_t inner_points = 801;   // nodes across the Gaussian ridge
  double ridge_sigmas = 9.0;        // inner range in units of the Gaussian width
};

struct ScalingFit {
  std::vector<double> kappas;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
};

/// I(kappa) = int int exp(-2 kappa (p + p')^2) v(p) v(p') g(p) g(p') dp dp' on
/// the full line, and the least-squares slope of log I against log kappa.
/// Throws FitFailed when I is not positive and decreasing.
ScalingFit smearing_scaling_check(const Profile& profile, const Profile& test_fn, std::span<const double> kappas,
                                  const SmearingQuadrature& quad = {});

/// The surviving pairing contribution after smearing: the Gaussian factor
/// evaluated on the support p' = -p, q' = -q of the delta functions, times
/// v(p) v(q) [p] [q], integrated over p and q. One value per kappa.
std::vector<double> smeared_pairing_term(const Profile& pairing, const Profile& test_fn,
                                         std::span<const double> kappas, const SmearingQuadrature& quad = {});

}  // namespace gapforge
