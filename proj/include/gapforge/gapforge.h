/* C interface to the gapforge gap-equation library.
 *
 * Every call returns a gf_status. On failure the message of the last error on
 * the calling thread is available from gf_last_error() until the next call.
 * Handles are opaque and owned by the caller; strings returned through
 * char** must be released with gf_string_free.
 */
#ifndef GAPFORGE_H
#define GAPFORGE_H

#include <stddef.h>

#if defined(GAPFORGE_BUILDING)
#define GF_API __attribute__((visibility("default")))
#else
#define GF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gf_status {
  GF_OK = 0,
  GF_ERR_INVALID_ARGUMENT,
  GF_ERR_NEGATIVE_CHEMICAL_POTENTIAL,
  GF_ERR_NEGATIVE_TEMPERATURE,
  GF_ERR_ZERO_TEMPERATURE,
  GF_ERR_ZERO_COUPLING,
  GF_ERR_SINGULAR_DENOMINATOR,
  GF_ERR_CONSTRAINT_VIOLATION,
  GF_ERR_NOT_ADMISSIBLE,
  GF_ERR_DOMAIN,
  GF_ERR_NOT_APPLICABLE,
  GF_ERR_PRECONDITION_FAILED,
  GF_ERR_SHELL_BELOW_ZERO,
  GF_ERR_NON_FINITE_INTEGRAND,
  GF_ERR_NOT_CONVERGED,
  GF_ERR_FIT_FAILED,
  GF_ERR_MOMENTUM_OFF_GRID,
  GF_ERR_ZERO_ENERGY,
  GF_ERR_PARSE,
  GF_ERR_IO,
  GF_ERR_INTERNAL
} gf_status;

GF_API const char* gf_status_name(gf_status status);
GF_API const char* gf_last_error(void);
GF_API void gf_string_free(char* s);

/* temperature may be INFINITY (beta = 0) or 0 (beta = infinity). */
typedef struct gf_params {
  double lambda_b;
  double lambda_m;
  double mu;
  double temperature;
} gf_params;

GF_API gf_status gf_params_from_beta(double lambda_b, double lambda_m, double mu, double beta, gf_params* out);
GF_API gf_status gf_validate(const gf_params* params);

typedef enum gf_phase { GF_PURE_MEAN_FIELD = 0, GF_MIXED_LOWER, GF_MIXED_UPPER, GF_TANGENT } gf_phase;
typedef enum gf_area { GF_AREA_A_PLUS = 0, GF_AREA_B_PLUS, GF_AREA_C_PLUS, GF_AREA_A_MINUS, GF_AREA_B_MINUS, GF_AREA_NONE } gf_area;
typedef enum gf_root_class { GF_NO_SOLUTION = 0, GF_UNIQUE, GF_TWO } gf_root_class;

typedef struct gf_solution {
  double delta_m;
  double delta_b;
  double w_bar;
  double c;
  double s;
  double phi;
  double residual;
  gf_phase phase;
} gf_solution;

/* ---- scalar solver ---- */

typedef struct gf_report gf_report;

/* tol <= 0 selects the default. With require_nonnegative_mean_field_energy set,
 * mixed solutions with mu + delta_M < 0 are dropped. */
GF_API gf_status gf_solve(const gf_params* params, double tol, int require_nonnegative_mean_field_energy,
                          gf_report** out);
GF_API void gf_report_destroy(gf_report* report);
GF_API size_t gf_report_count(const gf_report* report);
GF_API gf_status gf_report_solution(const gf_report* report, size_t index, gf_solution* out);
GF_API int gf_report_multiplicity(const gf_report* report);
GF_API gf_area gf_report_area(const gf_report* report);
GF_API gf_root_class gf_report_root_class(const gf_report* report);
/* check_mixing_angle adds the |c| >= sqrt(2)/2 check to the invariant list. */
GF_API gf_status gf_report_to_json(const gf_report* report, int check_mixing_angle, char** json);
/* One row per solution: phase,delta_M,delta_B,w_bar,c,s,phi,residual. */
GF_API gf_status gf_report_to_csv(const gf_report* report, char** csv);

/* Roots of the pairing equation as W values, ascending. *count receives the
 * number of roots; at most capacity are written. */
GF_API gf_status gf_pairing_roots(const gf_params* params, double tol, double* w_bar, size_t capacity, size_t* count);
GF_API gf_status gf_equilibrium_mu(double lambda_b_bar, double* mu_e_bar, double* x_e);
GF_API gf_status gf_critical_temperature(const gf_params* params, double* t_c);
GF_API gf_status gf_classify_region(const gf_params* params, double tol, gf_area* area, gf_root_class* roots);

/* ---- asymptotic regimes ---- */

typedef enum gf_regime { GF_REGIME_IA = 0, GF_REGIME_IB, GF_REGIME_IIA, GF_REGIME_IIB } gf_regime;

typedef struct gf_regime_solution {
  double w_bar;
  double delta_m;
  double delta_b;
  double validity_margin;
  int valid;
} gf_regime_solution;

GF_API gf_status gf_regime_closed_form(gf_regime regime, const gf_params* params, double window_factor,
                                       gf_regime_solution* out);

typedef struct gf_verification gf_verification;

/* tolerance <= 0 selects 1e-3 (A regimes) or 5e-2 (B regimes). */
GF_API gf_status gf_verify_regime(gf_regime regime, const gf_params* params, double tolerance,
                                  gf_verification** out);
GF_API int gf_verification_passed(const gf_verification* v);
GF_API gf_status gf_verification_to_json(const gf_verification* v, char** json);
GF_API void gf_verification_destroy(gf_verification* v);

/* ---- parameter scans ---- */

typedef struct gf_range {
  double min;
  double max;
  int steps;
} gf_range;

typedef struct gf_scan_spec {
  gf_range lambda_b;
  gf_range lambda_m;
  gf_range mu;
  gf_range temperature;
  double tol;          /* <= 0: default */
  unsigned threads;    /* 0: hardware concurrency, capped by GAPFORGE_THREADS */
  int require_nonnegative_mean_field_energy;
} gf_scan_spec;

typedef enum gf_format { GF_FORMAT_CSV = 0, GF_FORMAT_JSON } gf_format;

typedef struct gf_scan gf_scan;

GF_API gf_status gf_scan_run(const gf_scan_spec* spec, gf_scan** out);
GF_API size_t gf_scan_rows(const gf_scan* scan);
GF_API gf_status gf_scan_write(const gf_scan* scan, gf_format format, char** text);
GF_API void gf_scan_destroy(gf_scan* scan);

GF_API gf_status gf_equilibrium_curve(double lambda_b_bar_lo, double lambda_b_bar_hi, int steps, gf_format format,
                                      char** text);

/* ---- momentum-dependent kernels ---- */

typedef struct gf_kernel_problem gf_kernel_problem;

/* Separable shell kernels lambda S(p) around sqrt(mu) on a grid over [0, p_max]. */
GF_API gf_status gf_kernel_problem_shell(const gf_params* params, double epsilon, double p_max, size_t points,
                                         gf_kernel_problem** out);
/* Tabulated kernels read from CSV files (header row of momenta, then one row
 * per k). The grid is the header's momentum list; both files must share it. */
GF_API gf_status gf_kernel_problem_tabulated(const gf_params* params, const char* v_m_path, const char* v_b_path,
                                             gf_kernel_problem** out);
GF_API void gf_kernel_problem_destroy(gf_kernel_problem* problem);
GF_API size_t gf_kernel_problem_size(const gf_kernel_problem* problem);

typedef enum gf_init { GF_INIT_ZERO_PAIRING = 0, GF_INIT_SEEDED_PAIRING, GF_INIT_FROM_SCALAR } gf_init;
typedef enum gf_method { GF_METHOD_PICARD = 0, GF_METHOD_NEWTON_KRYLOV } gf_method;

typedef struct gf_iteration_controls {
  double damping;
  int max_iters;
  double tol;
  gf_init init;
  double seed;
  gf_method method;
} gf_iteration_controls;

GF_API gf_iteration_controls gf_iteration_controls_default(void);

typedef struct gf_gaps gf_gaps;

/* On GF_ERR_NOT_CONVERGED *out still receives the last iterate. */
GF_API gf_status gf_kernel_solve(const gf_kernel_problem* problem, const gf_iteration_controls* controls,
                                 gf_gaps** out);
GF_API void gf_gaps_destroy(gf_gaps* gaps);
GF_API size_t gf_gaps_size(const gf_gaps* gaps);
GF_API double gf_gaps_residual(const gf_gaps* gaps);
GF_API int gf_gaps_iterations(const gf_gaps* gaps);
/* Copies up to capacity entries of each array; any pointer may be NULL. */
GF_API gf_status gf_gaps_copy(const gf_gaps* gaps, double* momenta, double* delta_m, double* delta_b, double* w_bar,
                              size_t capacity);
GF_API gf_status gf_gaps_value_at(const gf_gaps* gaps, double p, double* delta_m, double* delta_b, double* w_bar);
GF_API gf_status gf_gaps_to_json(const gf_gaps* gaps, char** json);
/* Columns p,delta_M,delta_B,w_bar. */
GF_API gf_status gf_gaps_to_csv(const gf_gaps* gaps, char** csv);

typedef struct gf_branches gf_branches;

/* Solves from each seed (GF_INIT_SEEDED_PAIRING) and keeps distinct solutions. */
GF_API gf_status gf_kernel_branch_scan(const gf_kernel_problem* problem, const gf_iteration_controls* controls,
                                       const double* seeds, size_t n_seeds, gf_branches** out);
GF_API void gf_branches_destroy(gf_branches* branches);
GF_API size_t gf_branches_count(const gf_branches* branches);
GF_API size_t gf_branches_failures(const gf_branches* branches);
/* Borrowed view; valid while the gf_branches lives. */
GF_API const gf_gaps* gf_branches_get(const gf_branches* branches, size_t index);
GF_API gf_status gf_branches_to_json(const gf_branches* branches, char** json);
/* Columns branch,p,delta_M,delta_B,w_bar. */
GF_API gf_status gf_branches_to_csv(const gf_branches* branches, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* GAPFORGE_H */
