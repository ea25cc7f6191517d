#include <doctest.h>

#include <cmath>

#include "gapforge/asymptotics.hpp"
#include "gapforge/scalar_gap.hpp"
#include "oracles.hpp"

using namespace gapforge;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

void check_identity(const RegimeSolution& s, double mu) {
  const double e = mu + s.delta_M;
  CHECK(std::abs(e * e + s.delta_B * s.delta_B - s.w_bar * s.w_bar) <= 1e-12 * s.w_bar * s.w_bar);
}

}  // namespace

TEST_CASE("IA closed form") {
  const auto s = regime_IA({5, 0, 1, 0.01});
  CHECK(s.valid);
  CHECK(s.w_bar == 5);
  CHECK(s.delta_M == 0);
  CHECK(s.delta_B == doctest::Approx(std::sqrt(24.0)));
  CHECK(s.validity_margin == doctest::Approx(200));
  check_identity(s, 1);
  CHECK_FALSE(regime_IA({5, -3.5, 1, 0.01}).valid);
  CHECK_FALSE(regime_IA({5, 0, 1, 0.5}).valid);  // margin 4
  CHECK(code_of([] { regime_IA({5, -5, 1, 0.01}); }) == ErrorCode::SingularDenominator);
  CHECK(code_of([] { regime_IA({-5, 0, 1, 0.01}); }) == ErrorCode::PreconditionFailed);
}

TEST_CASE("IA restriction always holds for positive lambda_M") {
  auto g = oracle::rng(31);
  for (int i = 0; i < 200; ++i) {
    const double lb = oracle::uniform(g, 1, 10);
    const double mu = oracle::uniform(g, 0, lb);
    const auto s = regime_IA({lb, oracle::uniform(g, 0.001, 5), mu, 1e-4});
    if (s.validity_margin >= kDefaultWindowFactor) CHECK(s.valid);
  }
}

TEST_CASE("IB closed form") {
  const auto s = regime_IB({10, 0, 1, 0.4});
  CHECK(s.w_bar == doctest::Approx(10 / 9.2));
  CHECK(s.delta_M == 0);
  CHECK(s.delta_B == doctest::Approx(std::sqrt(std::pow(10 / 9.2, 2) - 1)));
  CHECK(s.delta_B == doctest::Approx(0.4269).epsilon(1e-3));
  CHECK(s.valid);
  check_identity(s, 1);

  // Radicand zero: lambda_B mu / (lambda_B - 2T) = mu + lambda_M.
  const double t = 0.1;
  const double lm = 10 * 1 / (10 - 2 * t) - 1;
  CHECK(regime_IB({10, lm, 1, t}).delta_B == doctest::Approx(0).scale(1e-6));
  CHECK(code_of([] { regime_IB({10, 0, 1, 5}); }) == ErrorCode::SingularDenominator);
  CHECK(code_of([] { regime_IB({10, 5, 1, 0.4}); }) == ErrorCode::NotAdmissible);
}

TEST_CASE("IIA closed form") {
  const auto s = regime_IIA({-1, -1, 2, 0.01});
  CHECK(s.w_bar == 1);
  CHECK(s.delta_M == doctest::Approx(-1.5));
  CHECK(s.delta_B == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(s.valid);
  check_identity(s, 2);
  CHECK_FALSE(regime_IIA({-1, -0.2, 2, 0.01}).valid);
  CHECK(code_of([] { regime_IIA({-1, 0.5, 2, 0.01}); }) == ErrorCode::PreconditionFailed);
}

TEST_CASE("IIB window") {
  // Upper bound lambda_B lambda_M / (2 (mu + lambda_M)) = 2, lower bound vacuous.
  CHECK(regime_IIB({-4, -0.5, 1, 1.9}).valid);
  CHECK_FALSE(regime_IIB({-4, -0.5, 1, 2.0}).valid);
  CHECK_FALSE(regime_IIB({-4, -1, 1, 0.5}).valid);  // mu + lambda_M = 0
  CHECK(code_of([] { regime_IIB({-4, 0, 1, 0.5}); }) == ErrorCode::NotAdmissible);  // W < mu
  check_identity(regime_IIB({-4, -0.5, 1, 1.9}), 1);
}

TEST_CASE("IIA mirrors IA") {
  auto g = oracle::rng(32);
  for (int i = 0; i < 100; ++i) {
    const double lb = oracle::uniform(g, 0.5, 5);
    const double mu = oracle::uniform(g, lb + 0.1, lb + 5);
    const double lm = -oracle::uniform(g, 0.01, 2);
    if (std::abs(lm - lb) < 0.05) continue;
    const auto neg = regime_IIA({-lb, lm, mu, 1e-3});
    CHECK(neg.w_bar == lb);
    const double den = -lb + lm;
    CHECK(neg.delta_M == doctest::Approx(lm * (-lb - mu) / den));
    const bool restriction = -lb + mu + 2 * lm < 0;
    if (neg.validity_margin >= 10) CHECK(neg.valid == (restriction && !std::isnan(neg.delta_B)));
  }
}

TEST_CASE("verify_regime agrees with the exact solver") {
  CHECK(verify_regime(Regime::IA, {5, 0, 1, 0.01}).pass);
  CHECK(verify_regime(Regime::IA, {5, 1, 1, 0.01}).pass);
  CHECK(verify_regime(Regime::IIA, {-1, -1, 2, 0.01}).pass);
  CHECK(verify_regime(Regime::IB, {60, 0, 1, 0.5}).pass);
  CHECK(code_of([] { verify_regime(Regime::IIA, {-1, 0.5, 2, 0.01}); }) == ErrorCode::PreconditionFailed);
  CHECK(code_of([] { verify_regime(Regime::IA, {5, 0, 1, 1}); }) == ErrorCode::PreconditionFailed);
}

TEST_CASE("IA oracle agreement over random valid points") {
  auto g = oracle::rng(33);
  int n = 0;
  while (n < 50) {
    const double lb = oracle::uniform(g, 1, 10);
    const double mu = oracle::uniform(g, 0.05, 0.9) * lb;
    const double lm = oracle::uniform(g, -0.45, 1.0) * (lb + mu);
    const double t = (lb - mu) / 2 / oracle::uniform(g, 10, 60);
    const ModelParams p{lb, lm, mu, t};
    const auto s = regime_IA(p);
    if (!s.valid || std::abs(lb + lm) < 0.2) continue;
    const auto v = verify_regime(Regime::IA, p);
    CHECK(v.pass);
    ++n;
  }
}
