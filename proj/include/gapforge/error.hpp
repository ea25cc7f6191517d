#pragma once

#include <stdexcept>
#include <string>

namespace gapforge {

enum class ErrorCode {
  InvalidArgument,
  NegativeChemicalPotential,
  NegativeTemperature,
  ZeroTemperature,
  ZeroCoupling,
  SingularDenominator,
  ConstraintViolation,
  NotAdmissible,
  DomainError,
  NotApplicable,
  PreconditionFailed,
  ShellBelowZero,
  NonFiniteIntegrand,
  NotConverged,
  FitFailed,
  MomentumOffGrid,
  ZeroEnergy,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gapforge
