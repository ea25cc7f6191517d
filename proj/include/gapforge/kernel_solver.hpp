#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gapforge/core_types.hpp"
#include "gapforge/error.hpp"
#include "gapforge/thermal.hpp"

namespace gapforge {

/// Nodes and trapezoid weights for a one-dimensional integral dp on p >= 0.
struct RadialGrid {
  std::vector<double> points;
  std::vector<double> weights;

  /// n equally spaced nodes on [0, p_max].
  static RadialGrid uniform(double p_max, std::size_t n);

  /// About n nodes on [0, p_max] with every breakpoint as a node. Points are
  /// shared out by segment length, at least 8 intervals per segment.
  static RadialGrid with_breakpoints(double p_max, std::size_t n, std::vector<double> breakpoints);

  /// Trapezoid weights on the given strictly increasing nodes.
  static RadialGrid from_points(std::vector<double> points);

  std::size_t size() const noexcept { return points.size(); }

  /// Index of the node within tol of p, if any.
  std::optional<std::size_t> index_of(double p, double tol = 1e-12) const;

  /// Trapezoid weights of the sub-grid on [lo, hi], zero elsewhere. Both ends
  /// must be nodes (MomentumOffGrid otherwise).
  std::vector<double> window_weights(double lo, double hi) const;
};

/// Radial shape S(p) with an optional closed support [lo, hi].
struct ShapeFunction {
  std::function<double(double)> fn;
  std::optional<std::pair<double, double>> support;

  double operator()(double p) const { return fn(p); }
};

/// S(k) = 1/(2 eps) on [sqrt(mu) - eps, sqrt(mu) + eps], 0 elsewhere.
/// Throws ShellBelowZero when sqrt(mu) <= eps.
ShapeFunction shell_kernel(double epsilon, double mu);

/// V(k, p) = lambda * 1[k in supp S] * S(p).
///
/// The row factor is the indicator of the support rather than S(k) itself, so
/// that the gap on the shell equals lambda times a normalized shell average.
/// Without support, the indicator is S(k) != 0. With support, the p-integral
/// uses the trapezoid restricted to the support.
struct SeparableKernel {
  double lambda = 0.0;
  ShapeFunction shape;
};

/// Values V(k_i, p_j) on a momentum list, row-major.
struct TabulatedKernel {
  std::vector<double> momenta;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * momenta.size() + j]; }
  bool symmetric(double rel_tol = 1e-12) const;
};

using KernelSpec = std::variant<SeparableKernel, TabulatedKernel>;

/// Reads a header row of n momenta followed by n rows of n values. Throws
/// ParseError with the line number on malformed input, IoError if unreadable.
TabulatedKernel load_tabulated_kernel_csv(const std::string& path);
TabulatedKernel parse_tabulated_kernel_csv(const std::string& text);

struct Dispersion {
  std::function<double(double)> omega;

  static Dispersion quadratic();  // omega(p) = p^2
  double operator()(double p) const { return omega(p); }
};

struct GapFunctions {
  std::vector<double> delta_M;
  std::vector<double> delta_B;
  std::vector<double> w_bar;
  double residual = 0.0;  // sup-norm of RHS(gaps) - gaps
  int iterations = 0;
};

/// Everything the gap equations need apart from the current gaps.
struct KernelProblem {
  RadialGrid grid;
  KernelSpec V_M;
  KernelSpec V_B;
  Dispersion dispersion = Dispersion::quadratic();
  ModelParams params;
};

enum class InitKind { ZeroPairing, SeededPairing, FromScalar };

struct InitialGuess {
  InitKind kind = InitKind::ZeroPairing;
  double value = 0.0;  // delta_B seed for SeededPairing

  static InitialGuess zero() { return {InitKind::ZeroPairing, 0.0}; }
  static InitialGuess seeded(double v) { return {InitKind::SeededPairing, v}; }
  static InitialGuess from_scalar() { return {InitKind::FromScalar, 0.0}; }
};

/// Picard: damped fixed-point iteration. NewtonKrylov: Newton on
/// RHS(x) - x with GMRES and finite-difference Jacobian products; needed for
/// branches that repel the fixed-point map.
enum class IterationMethod { Picard, NewtonKrylov };

struct IterationControls {
  double damping = 0.5;
  int max_iters = 10000;
  double tol = 1e-10;
  InitialGuess init;
  IterationMethod method = IterationMethod::Picard;
};

/// Carries the last iterate of a solve that hit max_iters.
class NotConvergedError : public Error {
 public:
  NotConvergedError(GapFunctions last, const std::string& message)
      : Error(ErrorCode::NotConverged, message), last_(std::move(last)) {}
  const GapFunctions& last() const noexcept { return last_; }

 private:
  GapFunctions last_;
};

/// Checks shapes, tabulated momenta against the grid, V_B symmetry and params.
void validate_problem(const KernelProblem& problem);

/// Assembles GapFunctions from the two gap vectors (w_bar from the dispersion).
GapFunctions make_gaps(const KernelProblem& problem, std::vector<double> delta_M, std::vector<double> delta_B);

/// Right sides of the two gap equations:
///   Delta_M(k) = 2 int V_M(k,p) {c^2 f + s^2 (1 - f)} dp,
///   Delta_B(k) = int V_B(k,p) (Delta_B(p)/W(p)) tanh(beta (W(p) - mu)/2) dp,
/// f = 1/(1 + exp(beta (W - mu))). W is recomputed from the outputs.
/// At W = 0 the ratios are taken as omega_eff/W = 1 and Delta_B/W = 0.
GapFunctions gap_rhs(const GapFunctions& gaps, const KernelProblem& problem);

GapFunctions initial_gaps(const KernelProblem& problem, const InitialGuess& init);

/// Throws NotConvergedError after max_iters, NonFiniteIntegrand on overflow.
GapFunctions self_consistent_solve(const KernelProblem& problem, const IterationControls& controls = {});

struct BranchScanResult {
  std::vector<GapFunctions> solutions;  // distinct by sup-norm > 10 tol, in seed order
  std::vector<std::string> failures;    // one message per seed that did not converge
};

/// Solves from every seed; requires at least one.
BranchScanResult branch_scan(const KernelProblem& problem, const std::vector<InitialGuess>& seeds,
                             const IterationControls& controls = {});

/// Value of a gap vector at a grid momentum (MomentumOffGrid otherwise).
double value_at(const RadialGrid& grid, const std::vector<double>& values, double p);

/// One ModeState per grid node, omega_eff = omega(p) + Delta_M(p).
std::vector<ModeState> modes_from_gaps(const GapFunctions& gaps, const KernelProblem& problem);

/// Shell problem with separable kernels lambda_M S and lambda_B S around sqrt(mu).
KernelProblem shell_problem(const ModelParams& params, double epsilon, double p_max, std::size_t points);

}  // namespace gapforge
