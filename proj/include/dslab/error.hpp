#pragma once

#include <stdexcept>
#include <string>

namespace dslab {

enum class ErrorCode {
  OutOfChart,
  SingularPoint,
  DegenerateMetric,
  StepFailure,
  NotInjective,
  NewtonDivergence,
  GridTooCoarse,
  ConstraintDrift,
  ThresholdViolation,
  BadParams,
  PoleTooClose,
  SingularCoefficient,
  PoleInBeta,
  NonConvergent,
  ConfigError,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ConstraintDrift: return "ConstraintDrift";
    case ErrorCode::ThresholdViolation: return "ThresholdViolation";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::PoleTooClose: return "PoleTooClose";
    case ErrorCode::SingularCoefficient: return "SingularCoefficient";
    case ErrorCode::PoleInBeta: return "PoleInBeta";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace dslab
