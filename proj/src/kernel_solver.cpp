#include "gapforge/kernel_solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gapforge/scalar_gap.hpp"
#include "numerics.hpp"

namespace gapforge {

namespace {

constexpr double kNodeTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kNodeTol * std::max(1.0, std::abs(b)); }

std::vector<double> trapezoid_weights(const std::vector<double>& pts) {
  std::vector<double> w(pts.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double h = pts[i + 1] - pts[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

// Discretized kernel times quadrature weights: either rank one (row x col) or
// a dense n x n matrix.
struct Operator {
  bool rank_one = false;
  std::vector<double> row;
  std::vector<double> col;
  std::vector<double> dense;
  std::vector<bool> active;  // rows that can carry a nonzero gap

  void apply(const std::vector<double>& g, std::vector<double>& out) const {
    const std::size_t n = g.size();
    out.assign(n, 0.0);
    if (rank_one) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += col[j] * g[j];
      for (std::size_t i = 0; i < n; ++i) out[i] = row[i] * acc;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* r = &dense[i * n];
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += r[j] * g[j];
      out[i] = acc;
    }
  }
};

bool in_support(const ShapeFunction& shape, double p) {
  if (shape.support) {
    const auto [lo, hi] = *shape.support;
    return p >= lo - kNodeTol * std::max(1.0, lo) && p <= hi + kNodeTol * std::max(1.0, hi);
  }
  return shape(p) != 0.0;
}

Operator discretize(const KernelSpec& spec, const RadialGrid& grid) {
  const std::size_t n = grid.size();
  Operator op;
  if (const auto* sep = std::get_if<SeparableKernel>(&spec)) {
    op.rank_one = true;
    op.row.resize(n);
    op.col.resize(n);
    op.active.resize(n);
    const auto w = sep->shape.support ? grid.window_weights(sep->shape.support->first, sep->shape.support->second)
                                      : grid.weights;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = grid.points[i];
      const bool on = in_support(sep->shape, p);
      op.row[i] = on ? sep->lambda : 0.0;
      op.col[i] = w[i] == 0.0 ? 0.0 : sep->shape(p) * w[i];
      op.active[i] = on && sep->lambda != 0.0;
    }
    return op;
  }
  const auto& tab = std::get<TabulatedKernel>(spec);
  op.dense.resize(n * n);
  op.active.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = tab.at(i, j);
      op.dense[i * n + j] = v * grid.weights[j];
      if (v != 0.0) op.active[i] = true;
    }
  }
  return op;
}

struct Discretized {
  Operator M;
  Operator B;
  std::vector<double> omega;
  double beta = 0.0;
  double mu = 0.0;
};

Discretized discretize(const KernelProblem& problem) {
  validate_problem(problem);
  Discretized d;
  d.M = discretize(problem.V_M, problem.grid);
  d.B = discretize(problem.V_B, problem.grid);
  d.omega.resize(problem.grid.size());
  for (std::size_t i = 0; i < d.omega.size(); ++i) d.omega[i] = problem.dispersion(problem.grid.points[i]);
  d.beta = problem.params.beta();
  d.mu = problem.params.mu;
  return d;
}

// x = [delta_M; delta_B] -> RHS(x) in the same layout.
void rhs(const Discretized& d, const std::vector<double>& x, std::vector<double>& out) {
  const std::size_t n = d.omega.size();
  std::vector<double> gM(n), gB(n), yM, yB;
  for (std::size_t i = 0; i < n; ++i) {
    const double om = d.omega[i] + x[i];
    const double db = x[n + i];
    const double w = std::hypot(om, db);
    const double cos2 = w == 0.0 ? 1.0 : om / w;  // c^2 - s^2
    const double sin2 = w == 0.0 ? 0.0 : db / w;  // 2cs
    const double f = detail::fermi(d.beta, w - d.mu);
    const double s2 = 0.5 * (1.0 - cos2);
    gM[i] = s2 + cos2 * f;  // c^2 f + s^2 (1 - f)
    gB[i] = sin2 * detail::thermal_tanh(d.beta, w - d.mu);
  }
  d.M.apply(gM, yM);
  d.B.apply(gB, yB);
  out.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 2.0 * yM[i];
    out[n + i] = yB[i];
    if (!std::isfinite(out[i]) || !std::isfinite(out[n + i])) {
      fail(ErrorCode::NonFiniteIntegrand, "non-finite gap at p = " + std::to_string(i));
    }
  }
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm2(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

GapFunctions to_gaps(const KernelProblem& problem, const std::vector<double>& x, double residual, int iters) {
  const std::size_t n = problem.grid.size();
  auto g = make_gaps(problem, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)),
                     std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(n), x.end()));
  g.residual = residual;
  g.iterations = iters;
  return g;
}

// Restarted GMRES for J d = b, J given as a matrix-free product.
std::vector<double> gmres(const std::function<void(const std::vector<double>&, std::vector<double>&)>& J,
                          const std::vector<double>& b, double rel_tol, std::size_t restart, int max_restarts) {
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) return x;
  std::vector<double> r = b, Jx;
  for (int cycle = 0; cycle < max_restarts; ++cycle) {
    if (cycle > 0) {
      J(x, Jx);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Jx[i];
    }
    const double beta = norm2(r);
    if (beta <= rel_tol * b_norm) break;
    const std::size_t m = std::min(restart, n);
    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    g[0] = beta;
    std::size_t k = 0;
    for (; k < m; ++k) {
      std::vector<double> w;
      J(V[k], w);
      for (std::size_t j = 0; j <= k; ++j) {
        H[j][k] = std::inner_product(w.begin(), w.end(), V[j].begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H[j][k] * V[j][i];
      }
      H[k + 1][k] = norm2(w);
      if (H[k + 1][k] > 0.0) {
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / H[k + 1][k];
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double den = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = den == 0.0 ? 1.0 : H[k][k] / den;
      sn[k] = den == 0.0 ? 0.0 : H[k + 1][k] / den;
      H[k][k] = den;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= rel_tol * b_norm || H[k][k] == 0.0) {
        ++k;
        break;
      }
    }
    std::vector<double> y(k, 0.0);
    for (std::size_t j = k; j-- > 0;) {
      double acc = g[j];
      for (std::size_t l = j + 1; l < k; ++l) acc -= H[j][l] * y[l];
      y[j] = H[j][j] == 0.0 ? 0.0 : acc / H[j][j];
    }
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * V[j][i];
  }
  return x;
}

GapFunctions picard(const KernelProblem& problem, const Discretized& d, std::vector<double> x,
                    const IterationControls& c) {
  std::vector<double> r;
  double defect = kInfinity;
  for (int it = 1; it <= c.max_iters; ++it) {
    rhs(d, x, r);
    defect = sup_diff(r, x);
    if (defect < c.tol) return to_gaps(problem, x, defect, it);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - c.damping) * x[i] + c.damping * r[i];
  }
  throw NotConvergedError(to_gaps(problem, x, defect, c.max_iters),
                          "fixed-point iteration stopped after " + std::to_string(c.max_iters) +
                              " iterations, residual " + std::to_string(defect));
}

GapFunctions newton_krylov(const KernelProblem& problem, const Discretized& d, std::vector<double> x,
                           const IterationControls& c) {
  const std::size_t n2 = x.size();
  auto F = [&](const std::vector<double>& v, std::vector<double>& out) {
    rhs(d, v, out);
    for (std::size_t i = 0; i < n2; ++i) out[i] -= v[i];
  };
  std::vector<double> fx, trial(n2), ft;
  F(x, fx);
  for (int it = 1; it <= c.max_iters; ++it) {
    double defect = 0.0;
    for (double v : fx) defect = std::max(defect, std::abs(v));
    if (defect < c.tol) return to_gaps(problem, x, defect, it);

    const double x_norm = norm2(x);
    auto jacobian = [&](const std::vector<double>& v, std::vector<double>& out) {
      const double v_norm = norm2(v);
      out.assign(n2, 0.0);
      if (v_norm == 0.0) return;
      const double h = 1e-7 * std::max(1.0, x_norm) / v_norm;
      std::vector<double> xp(n2), fp;
      for (std::size_t i = 0; i < n2; ++i) xp[i] = x[i] + h * v[i];
      F(xp, fp);
      for (std::size_t i = 0; i < n2; ++i) out[i] = (fp[i] - fx[i]) / h;
    };
    std::vector<double> minus_f(n2);
    for (std::size_t i = 0; i < n2; ++i) minus_f[i] = -fx[i];
    const auto step = gmres(jacobian, minus_f, 1e-6, 40, 10);

    // Backtracking on the 2-norm of F.
    const double f_norm = norm2(fx);
    double t = 1.0;
    for (;;) {
      for (std::size_t i = 0; i < n2; ++i) trial[i] = x[i] + t * step[i];
      F(trial, ft);
      if (norm2(ft) <= (1.0 - 1e-4 * t) * f_norm || t < 1e-4) break;
      t *= 0.5;
    }
    x = trial;
    fx = ft;
  }
  double defect = 0.0;
  for (double v : fx) defect = std::max(defect, std::abs(v));
  throw NotConvergedError(to_gaps(problem, x, defect, c.max_iters),
                          "Newton iteration stopped after " + std::to_string(c.max_iters) + " steps, residual " +
                              std::to_string(defect));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const auto field = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

RadialGrid RadialGrid::uniform(double p_max, std::size_t n) {
  if (!(p_max > 0.0) || !std::isfinite(p_max) || n < 2) fail(ErrorCode::InvalidArgument, "grid needs p_max > 0 and n >= 2");
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = p_max * static_cast<double>(i) / static_cast<double>(n - 1);
  pts.back() = p_max;
  return from_points(std::move(pts));
}

RadialGrid RadialGrid::with_breakpoints(double p_max, std::size_t n, std::vector<double> breakpoints) {
  if (!(p_max > 0.0) || !std::isfinite(p_max) || n < 2) fail(ErrorCode::InvalidArgument, "grid needs p_max > 0 and n >= 2");
  std::vector<double> edges{0.0};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints) {
    if (b > 0.0 && b < p_max && !near(b, edges.back())) edges.push_back(b);
  }
  if (!near(p_max, edges.back())) edges.push_back(p_max);
  const double intervals = static_cast<double>(n - 1);
  std::vector<double> pts{0.0};
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s];
    const double hi = edges[s + 1];
    const auto m = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(intervals * (hi - lo) / p_max)));
    for (std::size_t k = 1; k <= m; ++k) pts.push_back(k == m ? hi : lo + (hi - lo) * static_cast<double>(k) / m);
  }
  return from_points(std::move(pts));
}

RadialGrid RadialGrid::from_points(std::vector<double> points) {
  if (points.size() < 2) fail(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || points[i] < 0.0) fail(ErrorCode::InvalidArgument, "grid momenta must be finite and >= 0");
    if (i > 0 && !(points[i] > points[i - 1])) fail(ErrorCode::InvalidArgument, "grid momenta must be strictly increasing");
  }
  RadialGrid g;
  g.weights = trapezoid_weights(points);
  g.points = std::move(points);
  return g;
}

std::optional<std::size_t> RadialGrid::index_of(double p, double tol) const {
  const auto it = std::lower_bound(points.begin(), points.end(), p);
  const double scale = std::max(1.0, std::abs(p));
  if (it != points.end() && std::abs(*it - p) <= tol * scale) return static_cast<std::size_t>(it - points.begin());
  if (it != points.begin() && std::abs(*(it - 1) - p) <= tol * scale) {
    return static_cast<std::size_t>(it - 1 - points.begin());
  }
  return std::nullopt;
}

std::vector<double> RadialGrid::window_weights(double lo, double hi) const {
  const auto a = index_of(lo);
  const auto b = index_of(hi);
  if (!a || !b) fail(ErrorCode::MomentumOffGrid, "integration window ends are not grid nodes");
  std::vector<double> w(points.size(), 0.0);
  for (std::size_t i = *a; i < *b; ++i) {
    const double h = points[i + 1] - points[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

ShapeFunction shell_kernel(double epsilon, double mu) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidArgument, "shell half-width must be > 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) fail(ErrorCode::NegativeChemicalPotential, "mu must be >= 0");
  const double kf = std::sqrt(mu);
  if (!(kf - epsilon > 0.0)) fail(ErrorCode::ShellBelowZero, "shell reaches below zero: sqrt(mu) <= epsilon");
  const double lo = kf - epsilon;
  const double hi = kf + epsilon;
  const double height = 1.0 / (2.0 * epsilon);
  ShapeFunction s;
  s.fn = [lo, hi, height](double k) {
    const double a = std::abs(k);
    return a >= lo && a <= hi ? height : 0.0;
  };
  s.support = std::make_pair(lo, hi);
  return s;
}

bool TabulatedKernel::symmetric(double rel_tol) const {
  const std::size_t n = momenta.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = at(i, j);
      const double b = at(j, i);
      if (std::abs(a - b) > rel_tol * std::max({1.0, std::abs(a), std::abs(b)})) return false;
    }
  }
  return true;
}

TabulatedKernel parse_tabulated_kernel_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  TabulatedKernel k;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto values = parse_row(line, line_no);
    if (k.momenta.empty()) {
      k.momenta = std::move(values);
      continue;
    }
    if (values.size() != k.momenta.size()) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(k.momenta.size()) +
                                      " values, got " + std::to_string(values.size()));
    }
    if (rows == k.momenta.size()) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": more rows than momenta");
    }
    k.values.insert(k.values.end(), values.begin(), values.end());
    ++rows;
  }
  if (k.momenta.empty()) fail(ErrorCode::ParseError, "line 1: missing header row of momenta");
  if (rows != k.momenta.size()) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(k.momenta.size()) +
                                    " rows, got " + std::to_string(rows));
  }
  return k;
}

TabulatedKernel load_tabulated_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tabulated_kernel_csv(buf.str());
}

Dispersion Dispersion::quadratic() {
  return {[](double p) { return p * p; }};
}

void validate_problem(const KernelProblem& problem) {
  validate(problem.params);
  const auto& g = problem.grid;
  if (g.points.size() < 2 || g.weights.size() != g.points.size()) {
    fail(ErrorCode::InvalidArgument, "grid needs >= 2 points and one weight per point");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g.points[i] >= 0.0) || (i > 0 && !(g.points[i] > g.points[i - 1]))) {
      fail(ErrorCode::InvalidArgument, "grid momenta must be >= 0 and strictly increasing");
    }
    if (!(g.weights[i] > 0.0) || !std::isfinite(g.weights[i])) fail(ErrorCode::InvalidArgument, "grid weights must be > 0");
  }
  if (!problem.dispersion.omega) fail(ErrorCode::InvalidArgument, "missing dispersion");
  for (double p : g.points) {
    if (!std::isfinite(problem.dispersion(p))) fail(ErrorCode::NonFiniteIntegrand, "dispersion is not finite on the grid");
  }
  auto check = [&](const KernelSpec& spec, const char* name, bool need_symmetric) {
    if (const auto* sep = std::get_if<SeparableKernel>(&spec)) {
      if (!sep->shape.fn) fail(ErrorCode::InvalidArgument, std::string(name) + ": missing shape function");
      if (!std::isfinite(sep->lambda)) fail(ErrorCode::InvalidArgument, std::string(name) + ": coupling must be finite");
      return;
    }
    const auto& tab = std::get<TabulatedKernel>(spec);
    if (tab.momenta.size() != g.size() || tab.values.size() != g.size() * g.size()) {
      fail(ErrorCode::MomentumOffGrid, std::string(name) + ": table size does not match the grid");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!near(tab.momenta[i], g.points[i])) {
        fail(ErrorCode::MomentumOffGrid, std::string(name) + ": table momentum " + std::to_string(tab.momenta[i]) +
                                             " is not the grid node " + std::to_string(g.points[i]));
      }
    }
    if (need_symmetric && !tab.symmetric()) fail(ErrorCode::InvalidArgument, std::string(name) + " must be symmetric");
  };
  check(problem.V_M, "V_M", false);
  check(problem.V_B, "V_B", true);
}

GapFunctions make_gaps(const KernelProblem& problem, std::vector<double> delta_M, std::vector<double> delta_B) {
  const std::size_t n = problem.grid.size();
  if (delta_M.size() != n || delta_B.size() != n) fail(ErrorCode::InvalidArgument, "gap vectors do not match the grid");
  GapFunctions g;
  g.w_bar.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.w_bar[i] = std::hypot(problem.dispersion(problem.grid.points[i]) + delta_M[i], delta_B[i]);
  g.delta_M = std::move(delta_M);
  g.delta_B = std::move(delta_B);
  return g;
}

GapFunctions gap_rhs(const GapFunctions& gaps, const KernelProblem& problem) {
  const auto d = discretize(problem);
  const std::size_t n = problem.grid.size();
  if (gaps.delta_M.size() != n || gaps.delta_B.size() != n) fail(ErrorCode::InvalidArgument, "gap vectors do not match the grid");
  std::vector<double> x(gaps.delta_M);
  x.insert(x.end(), gaps.delta_B.begin(), gaps.delta_B.end());
  std::vector<double> r;
  rhs(d, x, r);
  auto out = to_gaps(problem, r, 0.0, 0);
  std::vector<double> r2;
  rhs(d, r, r2);
  out.residual = sup_diff(r2, r);
  return out;
}

namespace {

std::vector<double> initial_vector(const KernelProblem& problem, const Discretized& d, const InitialGuess& init) {
  const std::size_t n = problem.grid.size();
  std::vector<double> x(2 * n, 0.0);
  switch (init.kind) {
    case InitKind::ZeroPairing:
      break;
    case InitKind::SeededPairing:
      if (!std::isfinite(init.value)) fail(ErrorCode::InvalidArgument, "seed must be finite");
      for (std::size_t i = 0; i < n; ++i) x[n + i] = d.B.active[i] ? init.value : 0.0;
      break;
    case InitKind::FromScalar: {
      const auto* m = std::get_if<SeparableKernel>(&problem.V_M);
      const auto* b = std::get_if<SeparableKernel>(&problem.V_B);
      if (!m || !b) fail(ErrorCode::PreconditionFailed, "scalar start needs separable kernels");
      ModelParams p = problem.params;
      p.lambda_M = m->lambda;
      p.lambda_B = b->lambda;
      if (p.lambda_B == 0.0) break;
      const auto report = solve_all(p);
      const GapSolution* best = &report.solutions.front();
      for (const auto& s : report.solutions) {
        if (s.mixed() && (!best->mixed() || s.delta_B > best->delta_B)) best = &s;
      }
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = d.M.active[i] ? best->delta_M : 0.0;
        x[n + i] = d.B.active[i] ? best->delta_B : 0.0;
      }
      break;
    }
  }
  return x;
}

void check_controls(const IterationControls& c) {
  if (!(c.damping > 0.0 && c.damping <= 1.0)) fail(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
  if (c.max_iters < 1) fail(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(c.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
}

}  // namespace

GapFunctions initial_gaps(const KernelProblem& problem, const InitialGuess& init) {
  const auto d = discretize(problem);
  return to_gaps(problem, initial_vector(problem, d, init), 0.0, 0);
}

GapFunctions self_consistent_solve(const KernelProblem& problem, const IterationControls& controls) {
  check_controls(controls);
  const auto d = discretize(problem);
  auto x = initial_vector(problem, d, controls.init);
  if (controls.method == IterationMethod::NewtonKrylov) return newton_krylov(problem, d, std::move(x), controls);
  return picard(problem, d, std::move(x), controls);
}

BranchScanResult branch_scan(const KernelProblem& problem, const std::vector<InitialGuess>& seeds,
                             const IterationControls& controls) {
  if (seeds.empty()) fail(ErrorCode::InvalidArgument, "branch scan needs at least one seed");
  BranchScanResult out;
  for (const auto& seed : seeds) {
    IterationControls c = controls;
    c.init = seed;
    try {
      auto g = self_consistent_solve(problem, c);
      const bool duplicate = std::any_of(out.solutions.begin(), out.solutions.end(), [&](const GapFunctions& s) {
        return std::max(sup_diff(s.delta_M, g.delta_M), sup_diff(s.delta_B, g.delta_B)) < 10.0 * c.tol;
      });
      if (!duplicate) out.solutions.push_back(std::move(g));
    } catch (const NotConvergedError& e) {
      out.failures.push_back(std::string("seed ") + std::to_string(seed.value) + ": " + e.what());
    }
  }
  return out;
}

double value_at(const RadialGrid& grid, const std::vector<double>& values, double p) {
  const auto i = grid.index_of(p);
  if (!i) fail(ErrorCode::MomentumOffGrid, "momentum " + std::to_string(p) + " is not a grid node");
  return values.at(*i);
}

std::vector<ModeState> modes_from_gaps(const GapFunctions& gaps, const KernelProblem& problem) {
  std::vector<ModeState> modes;
  modes.reserve(problem.grid.size());
  for (std::size_t i = 0; i < problem.grid.size(); ++i) {
    const double p = problem.grid.points[i];
    modes.push_back(ModeState::make(p, problem.dispersion(p) + gaps.delta_M[i], gaps.delta_B[i]));
  }
  return modes;
}

KernelProblem shell_problem(const ModelParams& params, double epsilon, double p_max, std::size_t points) {
  const auto p = validate(params);
  auto shape = shell_kernel(epsilon, p.mu);
  const double kf = std::sqrt(p.mu);
  if (!(p_max > kf + epsilon)) fail(ErrorCode::InvalidArgument, "p_max must lie above the shell");
  KernelProblem problem;
  problem.grid = RadialGrid::with_breakpoints(p_max, points, {kf - epsilon, kf, kf + epsilon});
  problem.V_M = SeparableKernel{p.lambda_M, shape};
  problem.V_B = SeparableKernel{p.lambda_B, shape};
  problem.params = p;
  return problem;
}

}  // namespace gapforge
