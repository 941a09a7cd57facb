#ifndef PARASURF_ERROR_HPP
#define PARASURF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace parasurf {

/// Every failure raised by the library carries one of these codes. The CLI
/// maps configuration-type codes to exit status 1 and numerical ones to 2.
enum class ErrorCode {
  ParseError,
  NotAPermutation,
  GaussBonnetMismatch,
  HitsSingularity,
  BasisUnavailable,
  SolverFailure,
  ShapeMismatch,
  NoConvergence,
  SmallDivisor,
  NoSpectralGap,
  InsufficientRegularity,
  PreconditionViolated,
  EvaluationAtSingularity,
  IllConditioned,
  ContractionRegimeViolated,
  SmallnessGateFailed,
  RankDeficient,
  MissingArtifacts,
  ConfigError,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::GaussBonnetMismatch: return "GaussBonnetMismatch";
    case ErrorCode::HitsSingularity: return "HitsSingularity";
    case ErrorCode::BasisUnavailable: return "BasisUnavailable";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SmallDivisor: return "SmallDivisor";
    case ErrorCode::NoSpectralGap: return "NoSpectralGap";
    case ErrorCode::InsufficientRegularity: return "InsufficientRegularity";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EvaluationAtSingularity: return "EvaluationAtSingularity";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ContractionRegimeViolated: return "ContractionRegimeViolated";
    case ErrorCode::SmallnessGateFailed: return "SmallnessGateFailed";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::MissingArtifacts: return "MissingArtifacts";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

/// True for errors caused by bad input rather than by the numerics.
inline bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NotAPermutation:
    case ErrorCode::GaussBonnetMismatch:
    case ErrorCode::ConfigError:
    case ErrorCode::MissingArtifacts:
      return true;
    default:
      return false;
  }
}

}  // namespace parasurf

#endif  // PARASURF_ERROR_HPP
