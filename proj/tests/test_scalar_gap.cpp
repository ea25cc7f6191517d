#include <doctest.h>

#include <cmath>

#include "gapforge/phase_diagram.hpp"
#include "gapforge/scalar_gap.hpp"
#include "oracles.hpp"

using namespace gapforge;

namespace {

// T = 1/2 makes reduced and plain energies coincide.
ModelParams reduced_point(double lb_bar, double mu_bar, double lm = 0.0) { return {lb_bar, lm, mu_bar, 0.5}; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("tangent root at the equilibrium chemical potential") {
  const auto roots = pairing_energy_roots(reduced_point(4, 2.1471437));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].tangent);
  CHECK(roots[0].x == doctest::Approx(3.4641016).epsilon(1e-7));
  CHECK(roots[0].w_bar == doctest::Approx(3.4641016).epsilon(1e-7));
}

TEST_CASE("no roots at or above the critical temperature") {
  for (double mu_bar : {0.01, 0.3, 1.0, 5.0}) {
    CHECK(pairing_energy_roots(reduced_point(1.0, mu_bar)).empty());
    CHECK(oracle::pairing_roots(1.0, mu_bar).empty());
  }
}

TEST_CASE("repulsive pairing has one root below mu") {
  const auto roots = pairing_energy_roots(reduced_point(-2, 1));
  REQUIRE(roots.size() == 1);
  const auto ref = oracle::pairing_roots(-2, 1);
  REQUIRE(ref.size() == 1);
  CHECK(roots[0].x == doctest::Approx(0.6585).epsilon(1e-3 / 0.6585));
  CHECK(roots[0].x == doctest::Approx(ref[0]).epsilon(1e-9));
}

TEST_CASE("two roots below the tangency value, none above") {
  // f(x) = x - lb tanh(x - mu) is convex on x > mu with minimum mu - mu_e, so
  // the pair exists for mu below mu_e and disappears above it.
  const auto below = pairing_energy_roots(reduced_point(4, 1));
  const auto ref = oracle::pairing_roots(4, 1);
  REQUIRE(ref.size() == 2);
  REQUIRE(below.size() == 2);
  CHECK(below[0].x == doctest::Approx(ref[0]).epsilon(1e-9));
  CHECK(below[1].x == doctest::Approx(ref[1]).epsilon(1e-9));
  CHECK(below[0].x == doctest::Approx(1.3517671).epsilon(1e-7));
  CHECK(below[1].x == doctest::Approx(3.9793887).epsilon(1e-7));

  CHECK(pairing_energy_roots(reduced_point(4, 3)).empty());
  CHECK(oracle::pairing_roots(4, 3).empty());
}

TEST_CASE("zero coupling is signalled") {
  CHECK(code_of([] { pairing_energy_roots({0, 1, 1, 0.5}); }) == ErrorCode::ZeroCoupling);
}

TEST_CASE("root soundness against a dense grid scan") {
  auto g = oracle::rng(21);
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    const double lb = oracle::uniform(g, -12, 12);
    const double mu = oracle::uniform(g, 0, 10);
    if (std::abs(lb) < 1e-3) continue;
    // Skip near-tangent points, where a finite grid cannot decide the count.
    if (lb > 1) {
      const double d = mu - equilibrium_mu(lb).mu_e_bar;
      if (std::abs(d) < 1e-4) continue;
    }
    const auto roots = pairing_energy_roots(reduced_point(lb, mu));
    const auto ref = oracle::pairing_roots(lb, mu, 20000);
    REQUIRE(roots.size() == ref.size());
    for (std::size_t k = 0; k < roots.size(); ++k) {
      CHECK(roots[k].x == doctest::Approx(ref[k]).epsilon(1e-8));
      const double resid = std::abs(roots[k].x - lb * std::tanh(roots[k].x - mu));
      CHECK(resid < 1e-10 * std::max(1.0, std::abs(lb)));
    }
    ++compared;
  }
  CHECK(compared > 300);
}

TEST_CASE("roots sit on the correct side of mu and below |lambda_B|") {
  auto g = oracle::rng(22);
  for (int i = 0; i < 500; ++i) {
    const ModelParams p{oracle::uniform(g, -10, 10), 0.0, oracle::uniform(g, 0, 5), std::exp(oracle::uniform(g, -4, 1))};
    if (p.lambda_B == 0.0) continue;
    for (const auto& r : pairing_energy_roots(p)) {
      if (p.lambda_B > 0) CHECK(r.w_bar > p.mu);
      if (p.lambda_B < 0) CHECK(r.w_bar < p.mu);
      CHECK(r.w_bar <= std::abs(p.lambda_B) * (1 + 1e-12));
    }
  }
}

TEST_CASE("root count along a mu sweep at fixed coupling") {
  for (double lb : {1.5, 4.0, 9.0}) {
    const double mu_e = equilibrium_mu(lb).mu_e_bar;
    for (int k = 0; k <= 40; ++k) {
      const double mu = 2.0 * mu_e * k / 40.0;
      const double d = mu - mu_e;
      if (std::abs(d) < 1e-3) continue;
      const auto n = pairing_energy_roots(reduced_point(lb, mu)).size();
      if (mu == 0.0) {
        CHECK(n == 1);  // partner root sits at x = 0, excluded since W > 0
      } else {
        CHECK(n == (d < 0 ? 2u : 0u));
      }
    }
  }
}

TEST_CASE("mean-field gap on a mixed branch") {
  CHECK(mean_field_gap_given_w(3.0, {5, 0, 1, 0.1}) == 0.0);
  CHECK(mean_field_gap_given_w(5.0, {5, 1, 1, 0.01}) == doctest::Approx(2.0 / 3.0));
  CHECK(code_of([] { mean_field_gap_given_w(1.0, {5, -5, 1, 0.1}); }) == ErrorCode::SingularDenominator);
  // lambda_B < mu with lambda_M > 0 would flip the sign of Delta_M.
  CHECK(code_of([] { mean_field_gap_given_w(1.0, {0.5, 1, 1, 0.1}); }) == ErrorCode::ConstraintViolation);
}

TEST_CASE("closed-form mean-field gap matches fixed-point iteration") {
  auto g = oracle::rng(23);
  int checked = 0;
  while (checked < 100) {
    const double lb = oracle::uniform(g, 1, 10);
    const double mu = oracle::uniform(g, 0, lb * 0.9);
    const double lm = oracle::uniform(g, -0.4, 0.4) * (lb + mu);
    const double t = oracle::uniform(g, 0.02, 0.5) * lb;
    const ModelParams p{lb, lm, mu, t};
    const auto roots = pairing_energy_roots(p);
    if (roots.empty() || std::abs(lb + lm) < 0.1) continue;
    for (const auto& r : roots) {
      double closed = 0.0;
      try {
        closed = mean_field_gap_given_w(r.w_bar, p);
      } catch (const Error&) {
        continue;
      }
      const double iterated = oracle::mean_field_fixed_point(r.w_bar, lb, lm, mu, p.beta());
      CHECK(closed == doctest::Approx(iterated).epsilon(1e-10).scale(1.0));
    }
    ++checked;
  }
}

TEST_CASE("pairing gap from the quasi-particle energy") {
  CHECK(recover_delta_B(5, 0, {5, 0, 1, 0.01}) == doctest::Approx(std::sqrt(24.0)));
  CHECK(recover_delta_B(1.5, 0.5, {5, 1, 1, 0.01}) == 0.0);
  CHECK(code_of([] { recover_delta_B(1, 0.5, {5, 1, 1, 0.01}); }) == ErrorCode::NotAdmissible);
}

TEST_CASE("pure mean-field gap") {
  CHECK(pure_mean_field(ModelParams::from_beta(3, 0.7, 1, 0.0)) == 0.7);
  CHECK(pure_mean_field({3, 0, 1, 1}) == 0.0);
  CHECK(pure_mean_field({3, 1, 1, 1}) == doctest::Approx(0.6749).epsilon(1e-3 / 0.6749));
  CHECK(pure_mean_field({3, 1, 1, 1}) == doctest::Approx(oracle::pure_mean_field(1, 1)).epsilon(1e-12));
  auto g = oracle::rng(24);
  for (int i = 0; i < 200; ++i) {
    const double lm = oracle::uniform(g, -5, 5);
    const double beta = std::exp(oracle::uniform(g, -3, 3));
    const double d = pure_mean_field(ModelParams::from_beta(1, lm, 1, beta));
    CHECK(d == doctest::Approx(oracle::pure_mean_field(lm, beta)).epsilon(1e-10).scale(1.0));
    CHECK(d * lm >= 0.0);
    CHECK(std::abs(d) <= 2 * std::abs(lm));
  }
}

TEST_CASE("solve_all in the low-temperature attractive regime") {
  const auto r = solve_all({5, 0, 1, 0.01});
  REQUIRE(r.multiplicity >= 1);
  CHECK(r.solutions.front().phase == PhaseLabel::PureMeanField);
  const auto& upper = r.solutions.back();
  CHECK(upper.w_bar == doctest::Approx(5).epsilon(1e-3));
  CHECK(upper.delta_M == doctest::Approx(0).scale(1));
  CHECK(upper.delta_B == doctest::Approx(std::sqrt(24.0)).epsilon(1e-3));
  for (const auto& s : r.solutions) CHECK(check_invariants(s, r.params).empty());
}

TEST_CASE("solve_all above the critical temperature and at infinite temperature") {
  CHECK(solve_all({5, 0, 1, 2.5}).multiplicity == 0);
  CHECK(solve_all({5, 0, 1, 2.6}).multiplicity == 0);
  CHECK(solve_all({5, 1, 1, 3}).multiplicity == 0);
  const auto hot = solve_all(ModelParams::from_beta(5, 0.8, 1, 0.0));
  REQUIRE(hot.solutions.size() == 1);
  CHECK(hot.solutions[0].delta_M == 0.8);
  CHECK(hot.solutions[0].delta_B == 0.0);
  CHECK(hot.solutions[0].w_bar == 1.8);
}

TEST_CASE("multiplicity equals the number of non mean-field solutions") {
  auto g = oracle::rng(25);
  for (int i = 0; i < 300; ++i) {
    const ModelParams p{oracle::uniform(g, -10, 10), oracle::uniform(g, -3, 3), oracle::uniform(g, 0, 5),
                        std::exp(oracle::uniform(g, -4, 1))};
    const auto r = solve_all(p);
    int mixed = 0;
    for (const auto& s : r.solutions) mixed += s.phase != PhaseLabel::PureMeanField;
    CHECK(mixed == r.multiplicity);
    CHECK(r.multiplicity <= 2);
  }
}

TEST_CASE("Bogoliubov coefficients of emitted solutions are consistent") {
  auto g = oracle::rng(26);
  for (int i = 0; i < 300; ++i) {
    const ModelParams p{oracle::uniform(g, 1, 10), oracle::uniform(g, -1, 1), oracle::uniform(g, 0, 3),
                        std::exp(oracle::uniform(g, -4, 0))};
    for (const auto& s : solve_all(p).solutions) {
      if (!s.mixed()) continue;
      const auto& c = s.coeffs;
      CHECK(std::abs(c.c * c.c + c.s * c.s - 1) < 1e-12);
      CHECK(std::abs(2 * c.c * c.s * s.w_bar - s.delta_B) < 1e-10 * std::max(1.0, s.w_bar));
      CHECK(constraint_residual(s, p) < 1e-8);
    }
  }
}

TEST_CASE("equilibrium chemical potential") {
  const auto one = equilibrium_mu(1.0);
  CHECK(one.mu_e_bar == 0.0);
  CHECK(one.x_e == 0.0);
  const auto four = equilibrium_mu(4.0);
  CHECK(four.mu_e_bar == doctest::Approx(2.1471437).epsilon(1e-7));
  CHECK(four.x_e == doctest::Approx(std::sqrt(12.0)).epsilon(1e-14));
  CHECK(std::log(2 + std::sqrt(3.0)) == doctest::Approx(1.3169579).epsilon(1e-7));
  CHECK(code_of([] { equilibrium_mu(0.5); }) == ErrorCode::DomainError);
}

TEST_CASE("critical temperature") {
  CHECK(critical_temperature({5, 0, 1, 1}) == 2.5);
  CHECK(code_of([] { critical_temperature({-2, 0, 1, 1}); }) == ErrorCode::NotApplicable);
  for (double lb : {2.0, 5.0}) {
    const double tc = lb / 2;
    for (double f : {1.0, 1.01, 2.0, 10.0}) CHECK(pairing_energy_roots({lb, 0, lb / 5, tc * f}).empty());
    bool found = false;
    for (double f = 0.02; f < 1.0; f += 0.02) found = found || !pairing_energy_roots({lb, 0, lb / 5, tc * f}).empty();
    CHECK(found);
  }
}

TEST_CASE("zero temperature uses the sign limit") {
  const auto r = pairing_energy_roots({5, 0, 1, 0});
  REQUIRE(r.size() == 1);
  CHECK(r[0].w_bar == 5);
  CHECK(pairing_energy_roots({-1, 0, 2, 0}).size() == 1);
  CHECK(pairing_energy_roots({0.5, 0, 1, 0}).empty());
}
