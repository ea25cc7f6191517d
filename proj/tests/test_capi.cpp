#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "gapforge/gapforge.h"

#ifndef GF_TEST_DATA
#define GF_TEST_DATA "tests/data"
#endif

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  gf_string_free(s);
  return out;
}

std::string data(const char* name) { return std::string(GF_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(gf_status_name(GF_OK)) == "OK");
  CHECK(std::string(gf_status_name(GF_ERR_SHELL_BELOW_ZERO)) == "ShellBelowZero");
  const gf_params bad{5, 0, -1, 0.1};
  CHECK(gf_validate(&bad) == GF_ERR_NEGATIVE_CHEMICAL_POTENTIAL);
  CHECK(std::string(gf_last_error()).find("mu") != std::string::npos);
  const gf_params good{5, 0, 1, 0.1};
  CHECK(gf_validate(&good) == GF_OK);
  CHECK(gf_validate(nullptr) == GF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("beta conversion") {
  gf_params p;
  REQUIRE(gf_params_from_beta(5, 1, 1, 4, &p) == GF_OK);
  CHECK(p.temperature == doctest::Approx(0.25));
  REQUIRE(gf_params_from_beta(5, 1, 1, 0, &p) == GF_OK);
  CHECK(std::isinf(p.temperature));
}

TEST_CASE("solve through the C API") {
  const gf_params p{5, 1, 1, 0.01};
  gf_report* r = nullptr;
  REQUIRE(gf_solve(&p, 0, 0, &r) == GF_OK);
  REQUIRE(gf_report_count(r) == 2);
  gf_solution s;
  REQUIRE(gf_report_solution(r, 1, &s) == GF_OK);
  CHECK(s.phase == GF_MIXED_LOWER);  // a lone root
  CHECK(s.w_bar == doctest::Approx(5).epsilon(1e-9));
  CHECK(s.delta_m == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(gf_report_solution(r, 7, &s) == GF_ERR_INVALID_ARGUMENT);
  CHECK(gf_report_area(r) == GF_AREA_A_PLUS);
  CHECK(gf_report_multiplicity(r) == 1);

  char* text = nullptr;
  REQUIRE(gf_report_to_json(r, 1, &text) == GF_OK);
  const auto j = nlohmann::json::parse(take(text));
  CHECK(j["invariants_ok"] == true);
  REQUIRE(gf_report_to_csv(r, &text) == GF_OK);
  const auto csv = take(text);
  CHECK(csv.rfind("phase,delta_M,delta_B,w_bar,c,s,phi,residual\n", 0) == 0);
  gf_report_destroy(r);
  gf_report_destroy(nullptr);

  const gf_params neg{5, 0, -1, 0.01};
  r = reinterpret_cast<gf_report*>(0x1);
  CHECK(gf_solve(&neg, 0, 0, &r) == GF_ERR_NEGATIVE_CHEMICAL_POTENTIAL);
  CHECK(r == nullptr);
}

TEST_CASE("scalar helpers") {
  const gf_params p{8, 0, 2, 1};  // reduced (4, 1)
  double w[4];
  size_t n = 0;
  REQUIRE(gf_pairing_roots(&p, 0, w, 4, &n) == GF_OK);
  REQUIRE(n == 2);
  CHECK(w[0] == doctest::Approx(2 * 1.3517671).epsilon(1e-7));
  CHECK(w[1] == doctest::Approx(2 * 3.9793887).epsilon(1e-7));
  // Short buffers are filled as far as they go; count still reports all roots.
  double first = 0;
  CHECK(gf_pairing_roots(&p, 0, &first, 1, &n) == GF_OK);
  CHECK(n == 2);
  CHECK(first == w[0]);
  CHECK(gf_pairing_roots(&p, 0, nullptr, 0, &n) == GF_OK);

  double mu_e = 0, x_e = 0;
  REQUIRE(gf_equilibrium_mu(4, &mu_e, &x_e) == GF_OK);
  CHECK(mu_e == doctest::Approx(2.1471437).epsilon(1e-7));
  CHECK(x_e == doctest::Approx(std::sqrt(12.0)));
  CHECK(gf_equilibrium_mu(0.5, &mu_e, &x_e) == GF_ERR_DOMAIN);

  double tc = 0;
  REQUIRE(gf_critical_temperature(&p, &tc) == GF_OK);
  CHECK(tc == 4);
  const gf_params negb{-1, -1, 1, 0.5};
  CHECK(gf_critical_temperature(&negb, &tc) == GF_ERR_NOT_APPLICABLE);

  gf_area a;
  gf_root_class rc;
  REQUIRE(gf_classify_region(&negb, 0, &a, &rc) == GF_OK);
  CHECK(a == GF_AREA_B_MINUS);
}

TEST_CASE("regimes through the C API") {
  const gf_params p{5, 0, 1, 0.01};
  gf_regime_solution s;
  REQUIRE(gf_regime_closed_form(GF_REGIME_IA, &p, 0, &s) == GF_OK);
  CHECK(s.valid == 1);
  CHECK(s.delta_b == doctest::Approx(std::sqrt(24.0)));
  gf_verification* v = nullptr;
  REQUIRE(gf_verify_regime(GF_REGIME_IA, &p, 0, &v) == GF_OK);
  CHECK(gf_verification_passed(v) == 1);
  char* text = nullptr;
  REQUIRE(gf_verification_to_json(v, &text) == GF_OK);
  const auto j = nlohmann::json::parse(take(text));
  CHECK(j["regime"] == "IA");
  CHECK(j["comparisons"].size() == 3);
  gf_verification_destroy(v);
  CHECK(gf_verify_regime(GF_REGIME_IIA, &p, 0, &v) == GF_ERR_PRECONDITION_FAILED);
}

TEST_CASE("scans through the C API") {
  gf_scan_spec spec{};
  spec.lambda_b = {1, 10, 4};
  spec.lambda_m = {-1, 1, 3};
  spec.mu = {1, 1, 1};
  spec.temperature = {0.1, 1, 2};
  spec.threads = 2;
  gf_scan* s = nullptr;
  REQUIRE(gf_scan_run(&spec, &s) == GF_OK);
  CHECK(gf_scan_rows(s) == 24);
  char* text = nullptr;
  REQUIRE(gf_scan_write(s, GF_FORMAT_JSON, &text) == GF_OK);
  CHECK(nlohmann::json::parse(take(text)).size() == 24);
  gf_scan_destroy(s);
  spec.lambda_b.steps = 0;
  CHECK(gf_scan_run(&spec, &s) == GF_ERR_INVALID_ARGUMENT);

  REQUIRE(gf_equilibrium_curve(1.5, 8, 10, GF_FORMAT_CSV, &text) == GF_OK);
  CHECK(take(text).rfind("lambda_B_bar,mu_e_bar,x_e\n", 0) == 0);
}

TEST_CASE("shell kernel solve through the C API") {
  const gf_params p{5, 0, 1, 0.01};
  gf_kernel_problem* prob = nullptr;
  REQUIRE(gf_kernel_problem_shell(&p, 0.01, 2.0, 2000, &prob) == GF_OK);
  CHECK(gf_kernel_problem_size(prob) >= 2000);
  auto c = gf_iteration_controls_default();
  CHECK(c.damping == 0.5);
  c.init = GF_INIT_SEEDED_PAIRING;
  c.seed = 1.0;
  gf_gaps* g = nullptr;
  REQUIRE(gf_kernel_solve(prob, &c, &g) == GF_OK);
  double dm, db, w;
  REQUIRE(gf_gaps_value_at(g, 1.0, &dm, &db, &w) == GF_OK);
  CHECK(db == doctest::Approx(std::sqrt(24.0)).epsilon(1e-2));
  CHECK(gf_gaps_value_at(g, 1.00001, &dm, &db, &w) == GF_ERR_MOMENTUM_OFF_GRID);
  std::vector<double> ps(gf_gaps_size(g));
  REQUIRE(gf_gaps_copy(g, ps.data(), nullptr, nullptr, nullptr, ps.size()) == GF_OK);
  CHECK(ps.front() == 0.0);
  char* text = nullptr;
  REQUIRE(gf_gaps_to_csv(g, &text) == GF_OK);
  CHECK(take(text).rfind("p,delta_M,delta_B,w_bar\n", 0) == 0);
  gf_gaps_destroy(g);

  c.max_iters = 2;
  g = nullptr;
  CHECK(gf_kernel_solve(prob, &c, &g) == GF_ERR_NOT_CONVERGED);
  REQUIRE(g != nullptr);
  CHECK(gf_gaps_iterations(g) == 2);
  gf_gaps_destroy(g);
  gf_kernel_problem_destroy(prob);

  CHECK(gf_kernel_problem_shell(&p, 2.0, 4.0, 100, &prob) == GF_ERR_SHELL_BELOW_ZERO);
}

TEST_CASE("branch scan through the C API") {
  const gf_params p{4, 0, 1, 0.5};
  gf_kernel_problem* prob = nullptr;
  REQUIRE(gf_kernel_problem_shell(&p, 0.01, 2.0, 2000, &prob) == GF_OK);
  auto c = gf_iteration_controls_default();
  c.method = GF_METHOD_NEWTON_KRYLOV;
  c.max_iters = 100;
  const double seeds[] = {0.5, 4.5};
  gf_branches* b = nullptr;
  REQUIRE(gf_kernel_branch_scan(prob, &c, seeds, 2, &b) == GF_OK);
  CHECK(gf_branches_count(b) == 2);
  CHECK(gf_branches_failures(b) == 0);
  CHECK(gf_branches_get(b, 5) == nullptr);
  char* text = nullptr;
  REQUIRE(gf_branches_to_json(b, &text) == GF_OK);
  CHECK(nlohmann::json::parse(take(text))["solutions"].size() == 2);
  gf_branches_destroy(b);
  CHECK(gf_kernel_branch_scan(prob, &c, seeds, 0, &b) == GF_ERR_INVALID_ARGUMENT);
  gf_kernel_problem_destroy(prob);
}

TEST_CASE("tabulated kernels through the C API") {
  const gf_params p{1, 0, 1, 0.1};
  gf_kernel_problem* prob = nullptr;
  REQUIRE(gf_kernel_problem_tabulated(&p, data("gauss_vm.csv").c_str(), data("gauss_vb.csv").c_str(), &prob) ==
          GF_OK);
  CHECK(gf_kernel_problem_size(prob) == 21);
  auto c = gf_iteration_controls_default();
  c.init = GF_INIT_SEEDED_PAIRING;
  c.seed = 1.0;
  gf_gaps* g = nullptr;
  REQUIRE(gf_kernel_solve(prob, &c, &g) == GF_OK);
  CHECK(gf_gaps_residual(g) < 1e-10);
  gf_gaps_destroy(g);
  gf_kernel_problem_destroy(prob);

  CHECK(gf_kernel_problem_tabulated(&p, data("bad_cell.csv").c_str(), data("bad_cell.csv").c_str(), &prob) ==
        GF_ERR_PARSE);
  CHECK(std::string(gf_last_error()).find("line 3") != std::string::npos);
  CHECK(gf_kernel_problem_tabulated(&p, data("gauss_vm.csv").c_str(), data("asym_vb.csv").c_str(), &prob) !=
        GF_OK);
  CHECK(gf_kernel_problem_tabulated(&p, data("missing.csv").c_str(), data("missing.csv").c_str(), &prob) == GF_ERR_IO);
}
