#include <doctest.h>

#include <cmath>

#include "gapforge/core_types.hpp"
#include "oracles.hpp"

using namespace gapforge;

TEST_CASE("validate accepts physical parameters") {
  const ModelParams p{5, 1, 1, 0.1};
  const auto v = validate(p);
  CHECK(v.lambda_B == 5);
  CHECK(v.mu == 1);
  CHECK(v.beta() == doctest::Approx(10.0));
}

TEST_CASE("validate rejects negative mu and temperature") {
  try {
    validate({5, 1, -1, 0.1});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeChemicalPotential);
  }
  try {
    validate({5, 1, 1, -0.1});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeTemperature);
  }
}

TEST_CASE("zero temperature maps to infinite beta") {
  const auto v = validate({5, 1, 1, 0});
  CHECK(v.zero_temperature());
  CHECK(std::isinf(v.beta()));
  const auto hot = ModelParams::from_beta(5, 1, 1, 0.0);
  CHECK(hot.infinite_temperature());
  CHECK(hot.beta() == 0.0);
  CHECK(ModelParams::from_beta(5, 1, 1, 4.0).temperature == doctest::Approx(0.25));
}

TEST_CASE("reduced variables") {
  auto r = to_reduced({4, 0, 2, 0.5});
  CHECK(r.lambda_B_bar == doctest::Approx(4));
  CHECK(r.mu_bar == doctest::Approx(2));
  r = to_reduced({5, 0, 1, 2.5});
  CHECK(r.lambda_B_bar == doctest::Approx(1));
  CHECK(r.mu_bar == doctest::Approx(0.2));
  try {
    to_reduced({5, 0, 1, 0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroTemperature);
  }
}

TEST_CASE("reduced round trip over random parameters") {
  auto g = oracle::rng(11);
  for (int i = 0; i < 1000; ++i) {
    const ModelParams p{oracle::uniform(g, -50, 50), oracle::uniform(g, -50, 50), oracle::uniform(g, 0, 50),
                        std::exp(oracle::uniform(g, -8, 5))};
    const auto r = to_reduced(p);
    const double two_t = 2 * p.temperature;
    CHECK(std::abs(r.lambda_B_bar * two_t - p.lambda_B) <= 1e-12 * std::max(1.0, std::abs(p.lambda_B)));
    CHECK(std::abs(r.lambda_M_bar * two_t - p.lambda_M) <= 1e-12 * std::max(1.0, std::abs(p.lambda_M)));
    CHECK(std::abs(r.mu_bar * two_t - p.mu) <= 1e-12 * std::max(1.0, p.mu));
  }
}

TEST_CASE("invariant checker flags broken solutions") {
  const ModelParams p{5, 1, 1, 0.01};
  GapSolution good;
  good.phase = PhaseLabel::MixedUpper;
  good.w_bar = 5;
  good.delta_M = 2.0 / 3.0;
  good.delta_B = std::sqrt(25 - std::pow(1 + 2.0 / 3.0, 2));
  const double phi = 0.5 * std::atan2(good.delta_B, 1 + good.delta_M);
  good.coeffs = {std::cos(phi), std::sin(phi), phi};
  CHECK(check_invariants(good, p, 1e-9, true).empty());

  auto bad = good;
  bad.delta_M = -0.5;
  CHECK_FALSE(check_invariants(bad, p).empty());
  bad = good;
  bad.w_bar = 6;
  CHECK_FALSE(check_invariants(bad, p).empty());
  bad = good;
  bad.coeffs.c = 0.5;
  CHECK_FALSE(check_invariants(bad, p).empty());
}

TEST_CASE("enum names") {
  CHECK(std::string(to_string(PhaseLabel::Tangent)) == "Tangent");
  CHECK(std::string(to_string(Area::BMinus)) == "BMinus");
  CHECK(std::string(to_string(RootClass::Two)) == "Two");
  CHECK(std::string(to_string(ErrorCode::ShellBelowZero)) == "ShellBelowZero");
}
