#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace predlab {

enum class ErrorCode {
  kInvalidArgument,
  kStreamExhausted,
  kUnknownRule,
  kPrecisionRange,
  kPredictorNontotal,
  kScopeViolation,
  kScopeTooWide,
  kPolicyViolation,
  kEnumerationTooLarge,
  kNotNormalised,
  kInsufficientLength,
  kParseError,
  kInvalidConfig,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kStreamExhausted: return "STREAM_EXHAUSTED";
    case ErrorCode::kUnknownRule: return "UNKNOWN_RULE";
    case ErrorCode::kPrecisionRange: return "PRECISION_RANGE";
    case ErrorCode::kPredictorNontotal: return "PREDICTOR_NONTOTAL";
    case ErrorCode::kScopeViolation: return "SCOPE_VIOLATION";
    case ErrorCode::kScopeTooWide: return "SCOPE_TOO_WIDE";
    case ErrorCode::kPolicyViolation: return "POLICY_VIOLATION";
    case ErrorCode::kEnumerationTooLarge: return "ENUMERATION_TOO_LARGE";
    case ErrorCode::kNotNormalised: return "NOT_NORMALISED";
    case ErrorCode::kInsufficientLength: return "INSUFFICIENT_LENGTH";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace predlab
