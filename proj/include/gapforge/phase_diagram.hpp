#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gapforge/core_types.hpp"
#include "gapforge/scalar_gap.hpp"

namespace gapforge {

/// Points closer than this to an inequality boundary are snapped onto it, so
/// that the inequality as written (strict or not) decides the label.
inline constexpr double kBoundarySnap = 1e-6;

/// Area of the (lambda_B, lambda_M) plane from the closed-form inequalities:
///  lambda_B > 0: allowed iff lambda_B > mu; A-side iff lambda_M > -(lambda_B + mu)/2,
///    B/C-side iff lambda_M < (lambda_B - 4 mu)/4. APlus = A only, CPlus = C only,
///    BPlus = both.
///  lambda_B < 0: allowed iff -2 mu <= lambda_M <= -mu T / (|lambda_B| + 2T);
///    BMinus iff additionally lambda_M < -(lambda_B + 4 mu)/4, else AMinus.
Area classify_area(const ModelParams& params);

/// Area plus the root-count class of the pairing equation.
RegionLabel classify_region(const ModelParams& params, double tol = kDefaultTol);

/// Root-count class. For lambda_B > 0 this compares mu_bar with the tangency
/// value mu_e(lambda_B_bar): Two below, Unique on it (within sqrt(tol)), none
/// above. For lambda_B < 0 the roots are counted directly. Requires T > 0.
RootClass multiplicity_class(const ModelParams& params, double tol = kDefaultTol);

RootClass mixed_root_class(std::span<const PairingRoot> roots);

struct ParamRange {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  static ParamRange fixed(double v) { return {v, v, 1}; }
  std::vector<double> values() const;
};

struct ScanSpec {
  ParamRange lambda_B;
  ParamRange lambda_M;
  ParamRange mu;
  ParamRange temperature;
  SolveOptions solve;
  unsigned threads = 0;  // 0: default_scan_threads()
};

struct ScanRow {
  ModelParams params;
  RegionLabel region;
  int multiplicity = 0;
  double pure_delta_M = 0.0;
  double pure_w_bar = 0.0;
  std::vector<GapSolution> mixed;
  std::string error;  // non-empty when the point failed; solution columns are then empty
};

/// hardware_concurrency(), capped by GAPFORGE_THREADS when set.
unsigned default_scan_threads();

/// Row-major over (lambda_B, lambda_M, mu, temperature), temperature fastest.
/// Output order is independent of the thread count.
std::vector<ScanRow> scan(const ScanSpec& spec);

/// Samples equilibrium_mu on [lo, hi]; requires lo > 1.
std::vector<EquilibriumPoint> equilibrium_curve(double lambda_B_bar_lo, double lambda_B_bar_hi, int steps);

std::string format_double(double v);
void write_scan_csv(std::ostream& out, std::span<const ScanRow> rows);
void write_scan_json(std::ostream& out, std::span<const ScanRow> rows);
void write_equilibrium_csv(std::ostream& out, std::span<const EquilibriumPoint> points);
void write_equilibrium_json(std::ostream& out, std::span<const EquilibriumPoint> points);
void write_report_json(std::ostream& out, const SolveReport& report, bool check_mixing_angle = false);

}  // namespace gapforge
