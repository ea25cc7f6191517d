#include "gapforge/gapforge.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gapforge/asymptotics.hpp"
#include "gapforge/kernel_solver.hpp"
#include "gapforge/phase_diagram.hpp"
#include "gapforge/scalar_gap.hpp"

using namespace gapforge;

struct gf_report {
  SolveReport report;
};

struct gf_verification {
  RegimeVerification result;
};

struct gf_scan {
  std::vector<ScanRow> rows;
};

struct gf_kernel_problem {
  KernelProblem problem;
};

struct gf_gaps {
  std::vector<double> momenta;
  GapFunctions gaps;
};

struct gf_branches {
  std::vector<gf_gaps> solutions;
  std::vector<std::string> failures;
};

namespace {

thread_local std::string g_last_error;

gf_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return GF_ERR_INVALID_ARGUMENT;
    case ErrorCode::NegativeChemicalPotential: return GF_ERR_NEGATIVE_CHEMICAL_POTENTIAL;
    case ErrorCode::NegativeTemperature: return GF_ERR_NEGATIVE_TEMPERATURE;
    case ErrorCode::ZeroTemperature: return GF_ERR_ZERO_TEMPERATURE;
    case ErrorCode::ZeroCoupling: return GF_ERR_ZERO_COUPLING;
    case ErrorCode::SingularDenominator: return GF_ERR_SINGULAR_DENOMINATOR;
    case ErrorCode::ConstraintViolation: return GF_ERR_CONSTRAINT_VIOLATION;
    case ErrorCode::NotAdmissible: return GF_ERR_NOT_ADMISSIBLE;
    case ErrorCode::DomainError: return GF_ERR_DOMAIN;
    case ErrorCode::NotApplicable: return GF_ERR_NOT_APPLICABLE;
    case ErrorCode::PreconditionFailed: return GF_ERR_PRECONDITION_FAILED;
    case ErrorCode::ShellBelowZero: return GF_ERR_SHELL_BELOW_ZERO;
    case ErrorCode::NonFiniteIntegrand: return GF_ERR_NON_FINITE_INTEGRAND;
    case ErrorCode::NotConverged: return GF_ERR_NOT_CONVERGED;
    case ErrorCode::FitFailed: return GF_ERR_FIT_FAILED;
    case ErrorCode::MomentumOffGrid: return GF_ERR_MOMENTUM_OFF_GRID;
    case ErrorCode::ZeroEnergy: return GF_ERR_ZERO_ENERGY;
    case ErrorCode::ParseError: return GF_ERR_PARSE;
    case ErrorCode::IoError: return GF_ERR_IO;
  }
  return GF_ERR_INTERNAL;
}

// Runs body, mapping exceptions to status codes and the thread's last error.
template <class F>
gf_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return GF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return GF_ERR_INTERNAL;
}

void require(const void* p, const char* name) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(name) + " is null");
}

ModelParams from_c(const gf_params* p) {
  require(p, "params");
  return {p->lambda_b, p->lambda_m, p->mu, p->temperature};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gf_phase to_c(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::PureMeanField: return GF_PURE_MEAN_FIELD;
    case PhaseLabel::MixedLower: return GF_MIXED_LOWER;
    case PhaseLabel::MixedUpper: return GF_MIXED_UPPER;
    case PhaseLabel::Tangent: return GF_TANGENT;
  }
  return GF_PURE_MEAN_FIELD;
}

gf_area to_c(Area a) {
  switch (a) {
    case Area::APlus: return GF_AREA_A_PLUS;
    case Area::BPlus: return GF_AREA_B_PLUS;
    case Area::CPlus: return GF_AREA_C_PLUS;
    case Area::AMinus: return GF_AREA_A_MINUS;
    case Area::BMinus: return GF_AREA_B_MINUS;
    case Area::None: return GF_AREA_NONE;
  }
  return GF_AREA_NONE;
}

gf_root_class to_c(RootClass r) {
  switch (r) {
    case RootClass::NoSolution: return GF_NO_SOLUTION;
    case RootClass::Unique: return GF_UNIQUE;
    case RootClass::Two: return GF_TWO;
  }
  return GF_NO_SOLUTION;
}

Regime from_c(gf_regime r) {
  switch (r) {
    case GF_REGIME_IA: return Regime::IA;
    case GF_REGIME_IB: return Regime::IB;
    case GF_REGIME_IIA: return Regime::IIA;
    case GF_REGIME_IIB: return Regime::IIB;
  }
  fail(ErrorCode::InvalidArgument, "unknown regime");
}

ParamRange from_c(const gf_range& r) { return {r.min, r.max, r.steps}; }

IterationControls from_c(const gf_iteration_controls* c) {
  IterationControls out;
  if (!c) return out;
  out.damping = c->damping;
  out.max_iters = c->max_iters;
  out.tol = c->tol;
  out.method = c->method == GF_METHOD_NEWTON_KRYLOV ? IterationMethod::NewtonKrylov : IterationMethod::Picard;
  switch (c->init) {
    case GF_INIT_ZERO_PAIRING: out.init = InitialGuess::zero(); break;
    case GF_INIT_SEEDED_PAIRING: out.init = InitialGuess::seeded(c->seed); break;
    case GF_INIT_FROM_SCALAR: out.init = InitialGuess::from_scalar(); break;
    default: fail(ErrorCode::InvalidArgument, "unknown init kind");
  }
  return out;
}

void gaps_csv(std::ostream& os, const gf_gaps& g, const std::string& prefix) {
  for (std::size_t i = 0; i < g.momenta.size(); ++i) {
    os << prefix << format_double(g.momenta[i]) << ',' << format_double(g.gaps.delta_M[i]) << ','
       << format_double(g.gaps.delta_B[i]) << ',' << format_double(g.gaps.w_bar[i]) << '\n';
  }
}

nlohmann::json gaps_json(const gf_gaps& g) {
  return {{"momenta", g.momenta},
          {"delta_M", g.gaps.delta_M},
          {"delta_B", g.gaps.delta_B},
          {"w_bar", g.gaps.w_bar},
          {"residual", g.gaps.residual},
          {"iterations", g.gaps.iterations}};
}

}  // namespace

extern "C" {

const char* gf_status_name(gf_status status) {
  switch (status) {
    case GF_OK: return "OK";
    case GF_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case GF_ERR_NEGATIVE_CHEMICAL_POTENTIAL: return "NegativeChemicalPotential";
    case GF_ERR_NEGATIVE_TEMPERATURE: return "NegativeTemperature";
    case GF_ERR_ZERO_TEMPERATURE: return "ZeroTemperature";
    case GF_ERR_ZERO_COUPLING: return "ZeroCoupling";
    case GF_ERR_SINGULAR_DENOMINATOR: return "SingularDenominator";
    case GF_ERR_CONSTRAINT_VIOLATION: return "ConstraintViolation";
    case GF_ERR_NOT_ADMISSIBLE: return "NotAdmissible";
    case GF_ERR_DOMAIN: return "DomainError";
    case GF_ERR_NOT_APPLICABLE: return "NotApplicable";
    case GF_ERR_PRECONDITION_FAILED: return "PreconditionFailed";
    case GF_ERR_SHELL_BELOW_ZERO: return "ShellBelowZero";
    case GF_ERR_NON_FINITE_INTEGRAND: return "NonFiniteIntegrand";
    case GF_ERR_NOT_CONVERGED: return "NotConverged";
    case GF_ERR_FIT_FAILED: return "FitFailed";
    case GF_ERR_MOMENTUM_OFF_GRID: return "MomentumOffGrid";
    case GF_ERR_ZERO_ENERGY: return "ZeroEnergy";
    case GF_ERR_PARSE: return "ParseError";
    case GF_ERR_IO: return "IoError";
    case GF_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* gf_last_error(void) { return g_last_error.c_str(); }

void gf_string_free(char* s) { std::free(s); }

gf_status gf_params_from_beta(double lambda_b, double lambda_m, double mu, double beta, gf_params* out) {
  return guarded([&] {
    require(out, "out");
    const auto p = ModelParams::from_beta(lambda_b, lambda_m, mu, beta);
    *out = {p.lambda_B, p.lambda_M, p.mu, p.temperature};
  });
}

gf_status gf_validate(const gf_params* params) {
  return guarded([&] { validate(from_c(params)); });
}

gf_status gf_solve(const gf_params* params, double tol, int require_nonneg, gf_report** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    SolveOptions opts;
    if (tol > 0.0) opts.tol = tol;
    opts.require_nonnegative_mean_field_energy = require_nonneg != 0;
    auto r = std::make_unique<gf_report>();
    r->report = solve_all(from_c(params), opts);
    *out = r.release();
  });
}

void gf_report_destroy(gf_report* report) { delete report; }

size_t gf_report_count(const gf_report* report) { return report ? report->report.solutions.size() : 0; }

gf_status gf_report_solution(const gf_report* report, size_t index, gf_solution* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (index >= report->report.solutions.size()) fail(ErrorCode::InvalidArgument, "solution index out of range");
    const auto& s = report->report.solutions[index];
    *out = {s.delta_M, s.delta_B, s.w_bar, s.coeffs.c, s.coeffs.s, s.coeffs.phi, s.residual, to_c(s.phase)};
  });
}

int gf_report_multiplicity(const gf_report* report) { return report ? report->report.multiplicity : 0; }

gf_area gf_report_area(const gf_report* report) { return report ? to_c(report->report.region.area) : GF_AREA_NONE; }

gf_root_class gf_report_root_class(const gf_report* report) {
  return report ? to_c(report->report.region.roots) : GF_NO_SOLUTION;
}

gf_status gf_report_to_json(const gf_report* report, int check_mixing_angle, char** json) {
  return guarded([&] {
    require(report, "report");
    require(json, "json");
    std::ostringstream os;
    write_report_json(os, report->report, check_mixing_angle != 0);
    *json = dup_string(os.str());
  });
}

gf_status gf_report_to_csv(const gf_report* report, char** csv) {
  return guarded([&] {
    require(report, "report");
    require(csv, "csv");
    std::ostringstream os;
    os << "phase,delta_M,delta_B,w_bar,c,s,phi,residual\n";
    for (const auto& s : report->report.solutions) {
      os << to_string(s.phase) << ',' << format_double(s.delta_M) << ',' << format_double(s.delta_B) << ','
         << format_double(s.w_bar) << ',' << format_double(s.coeffs.c) << ',' << format_double(s.coeffs.s) << ','
         << format_double(s.coeffs.phi) << ',' << format_double(s.residual) << '\n';
    }
    *csv = dup_string(os.str());
  });
}

gf_status gf_pairing_roots(const gf_params* params, double tol, double* w_bar, size_t capacity, size_t* count) {
  return guarded([&] {
    require(count, "count");
    RootSearchSettings settings;
    if (tol > 0.0) settings.tol = tol;
    const auto roots = pairing_energy_roots(from_c(params), settings);
    *count = roots.size();
    if (capacity > 0) require(w_bar, "w_bar");
    for (size_t i = 0; i < roots.size() && i < capacity; ++i) w_bar[i] = roots[i].w_bar;
  });
}

gf_status gf_equilibrium_mu(double lambda_b_bar, double* mu_e_bar, double* x_e) {
  return guarded([&] {
    const auto e = equilibrium_mu(lambda_b_bar);
    if (mu_e_bar) *mu_e_bar = e.mu_e_bar;
    if (x_e) *x_e = e.x_e;
  });
}

gf_status gf_critical_temperature(const gf_params* params, double* t_c) {
  return guarded([&] {
    require(t_c, "t_c");
    *t_c = critical_temperature(from_c(params));
  });
}

gf_status gf_classify_region(const gf_params* params, double tol, gf_area* area, gf_root_class* roots) {
  return guarded([&] {
    const auto label = classify_region(from_c(params), tol > 0.0 ? tol : kDefaultTol);
    if (area) *area = to_c(label.area);
    if (roots) *roots = to_c(label.roots);
  });
}

gf_status gf_regime_closed_form(gf_regime regime, const gf_params* params, double window_factor,
                                gf_regime_solution* out) {
  return guarded([&] {
    require(out, "out");
    const auto s = regime_solution(from_c(regime), from_c(params), window_factor > 0.0 ? window_factor : kDefaultWindowFactor);
    *out = {s.w_bar, s.delta_M, s.delta_B, s.validity_margin, s.valid ? 1 : 0};
  });
}

gf_status gf_verify_regime(gf_regime regime, const gf_params* params, double tolerance, gf_verification** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto v = std::make_unique<gf_verification>();
    v->result = verify_regime(from_c(regime), from_c(params), tolerance);
    *out = v.release();
  });
}

int gf_verification_passed(const gf_verification* v) { return v && v->result.pass ? 1 : 0; }

gf_status gf_verification_to_json(const gf_verification* v, char** json) {
  return guarded([&] {
    require(v, "verification");
    require(json, "json");
    const auto& r = v->result;
    nlohmann::json j;
    j["regime"] = to_string(r.closed_form.regime);
    j["closed_form"] = {{"w_bar", r.closed_form.w_bar},
                        {"delta_M", r.closed_form.delta_M},
                        {"delta_B", r.closed_form.delta_B},
                        {"valid", r.closed_form.valid},
                        {"validity_margin", r.closed_form.validity_margin}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"quantity", row.quantity},
                      {"numeric", row.numeric},
                      {"closed_form", row.closed_form},
                      {"rel_error", std::isfinite(row.rel_error) ? nlohmann::json(row.rel_error) : nlohmann::json()},
                      {"tolerance", row.tolerance},
                      {"pass", row.pass}});
    }
    j["comparisons"] = rows;
    j["pass"] = r.pass;
    *json = dup_string(j.dump(2));
  });
}

void gf_verification_destroy(gf_verification* v) { delete v; }

gf_status gf_scan_run(const gf_scan_spec* spec, gf_scan** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = nullptr;
    ScanSpec s;
    s.lambda_B = from_c(spec->lambda_b);
    s.lambda_M = from_c(spec->lambda_m);
    s.mu = from_c(spec->mu);
    s.temperature = from_c(spec->temperature);
    if (spec->tol > 0.0) s.solve.tol = spec->tol;
    s.solve.require_nonnegative_mean_field_energy = spec->require_nonnegative_mean_field_energy != 0;
    s.threads = spec->threads;
    auto result = std::make_unique<gf_scan>();
    result->rows = scan(s);
    *out = result.release();
  });
}

size_t gf_scan_rows(const gf_scan* scan) { return scan ? scan->rows.size() : 0; }

gf_status gf_scan_write(const gf_scan* scan, gf_format format, char** text) {
  return guarded([&] {
    require(scan, "scan");
    require(text, "text");
    std::ostringstream os;
    if (format == GF_FORMAT_JSON) {
      write_scan_json(os, scan->rows);
    } else {
      write_scan_csv(os, scan->rows);
    }
    *text = dup_string(os.str());
  });
}

void gf_scan_destroy(gf_scan* scan) { delete scan; }

gf_status gf_equilibrium_curve(double lo, double hi, int steps, gf_format format, char** text) {
  return guarded([&] {
    require(text, "text");
    const auto points = equilibrium_curve(lo, hi, steps);
    std::ostringstream os;
    if (format == GF_FORMAT_JSON) {
      write_equilibrium_json(os, points);
    } else {
      write_equilibrium_csv(os, points);
    }
    *text = dup_string(os.str());
  });
}

gf_status gf_kernel_problem_shell(const gf_params* params, double epsilon, double p_max, size_t points,
                                  gf_kernel_problem** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto p = std::make_unique<gf_kernel_problem>();
    p->problem = shell_problem(from_c(params), epsilon, p_max, points);
    *out = p.release();
  });
}

gf_status gf_kernel_problem_tabulated(const gf_params* params, const char* v_m_path, const char* v_b_path,
                                      gf_kernel_problem** out) {
  return guarded([&] {
    require(out, "out");
    require(v_m_path, "v_m_path");
    require(v_b_path, "v_b_path");
    *out = nullptr;
    auto vm = load_tabulated_kernel_csv(v_m_path);
    auto vb = load_tabulated_kernel_csv(v_b_path);
    if (vm.momenta != vb.momenta) fail(ErrorCode::MomentumOffGrid, "V_M and V_B tables use different momenta");
    auto p = std::make_unique<gf_kernel_problem>();
    p->problem.params = validate(from_c(params));
    p->problem.grid = RadialGrid::from_points(vm.momenta);
    p->problem.V_M = std::move(vm);
    p->problem.V_B = std::move(vb);
    validate_problem(p->problem);
    *out = p.release();
  });
}

void gf_kernel_problem_destroy(gf_kernel_problem* problem) { delete problem; }

size_t gf_kernel_problem_size(const gf_kernel_problem* problem) { return problem ? problem->problem.grid.size() : 0; }

gf_iteration_controls gf_iteration_controls_default(void) {
  const IterationControls c;
  return {c.damping, c.max_iters, c.tol, GF_INIT_ZERO_PAIRING, 0.0, GF_METHOD_PICARD};
}

gf_status gf_kernel_solve(const gf_kernel_problem* problem, const gf_iteration_controls* controls, gf_gaps** out) {
  gf_gaps* partial = nullptr;
  const gf_status st = guarded([&] {
    require(problem, "problem");
    require(out, "out");
    *out = nullptr;
    auto g = std::make_unique<gf_gaps>();
    g->momenta = problem->problem.grid.points;
    try {
      g->gaps = self_consistent_solve(problem->problem, from_c(controls));
    } catch (const NotConvergedError& e) {
      g->gaps = e.last();
      partial = g.release();
      throw;
    }
    *out = g.release();
  });
  if (partial && out) *out = partial;
  return st;
}

void gf_gaps_destroy(gf_gaps* gaps) { delete gaps; }

size_t gf_gaps_size(const gf_gaps* gaps) { return gaps ? gaps->momenta.size() : 0; }

double gf_gaps_residual(const gf_gaps* gaps) { return gaps ? gaps->gaps.residual : NAN; }

int gf_gaps_iterations(const gf_gaps* gaps) { return gaps ? gaps->gaps.iterations : 0; }

gf_status gf_gaps_copy(const gf_gaps* gaps, double* momenta, double* delta_m, double* delta_b, double* w_bar,
                       size_t capacity) {
  return guarded([&] {
    require(gaps, "gaps");
    const size_t n = std::min(capacity, gaps->momenta.size());
    for (size_t i = 0; i < n; ++i) {
      if (momenta) momenta[i] = gaps->momenta[i];
      if (delta_m) delta_m[i] = gaps->gaps.delta_M[i];
      if (delta_b) delta_b[i] = gaps->gaps.delta_B[i];
      if (w_bar) w_bar[i] = gaps->gaps.w_bar[i];
    }
  });
}

gf_status gf_gaps_value_at(const gf_gaps* gaps, double p, double* delta_m, double* delta_b, double* w_bar) {
  return guarded([&] {
    require(gaps, "gaps");
    const auto grid = RadialGrid::from_points(gaps->momenta);
    if (delta_m) *delta_m = value_at(grid, gaps->gaps.delta_M, p);
    if (delta_b) *delta_b = value_at(grid, gaps->gaps.delta_B, p);
    if (w_bar) *w_bar = value_at(grid, gaps->gaps.w_bar, p);
  });
}

gf_status gf_gaps_to_json(const gf_gaps* gaps, char** json) {
  return guarded([&] {
    require(gaps, "gaps");
    require(json, "json");
    *json = dup_string(gaps_json(*gaps).dump(2));
  });
}

gf_status gf_gaps_to_csv(const gf_gaps* gaps, char** csv) {
  return guarded([&] {
    require(gaps, "gaps");
    require(csv, "csv");
    std::ostringstream os;
    os << "p,delta_M,delta_B,w_bar\n";
    gaps_csv(os, *gaps, "");
    *csv = dup_string(os.str());
  });
}

gf_status gf_kernel_branch_scan(const gf_kernel_problem* problem, const gf_iteration_controls* controls,
                                const double* seeds, size_t n_seeds, gf_branches** out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    if (n_seeds > 0) require(seeds, "seeds");
    *out = nullptr;
    std::vector<InitialGuess> guesses;
    for (size_t i = 0; i < n_seeds; ++i) guesses.push_back(InitialGuess::seeded(seeds[i]));
    const auto result = branch_scan(problem->problem, guesses, from_c(controls));
    auto b = std::make_unique<gf_branches>();
    for (const auto& g : result.solutions) b->solutions.push_back({problem->problem.grid.points, g});
    b->failures = result.failures;
    *out = b.release();
  });
}

void gf_branches_destroy(gf_branches* branches) { delete branches; }

size_t gf_branches_count(const gf_branches* branches) { return branches ? branches->solutions.size() : 0; }

size_t gf_branches_failures(const gf_branches* branches) { return branches ? branches->failures.size() : 0; }

const gf_gaps* gf_branches_get(const gf_branches* branches, size_t index) {
  if (!branches || index >= branches->solutions.size()) return nullptr;
  return &branches->solutions[index];
}

gf_status gf_branches_to_json(const gf_branches* branches, char** json) {
  return guarded([&] {
    require(branches, "branches");
    require(json, "json");
    nlohmann::json j;
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& s : branches->solutions) sols.push_back(gaps_json(s));
    j["solutions"] = sols;
    j["failures"] = branches->failures;
    *json = dup_string(j.dump(2));
  });
}

gf_status gf_branches_to_csv(const gf_branches* branches, char** csv) {
  return guarded([&] {
    require(branches, "branches");
    require(csv, "csv");
    std::ostringstream os;
    os << "branch,p,delta_M,delta_B,w_bar\n";
    for (std::size_t b = 0; b < branches->solutions.size(); ++b) gaps_csv(os, branches->solutions[b], std::to_string(b) + ",");
    *csv = dup_string(os.str());
  });
}

}  // extern "C"
