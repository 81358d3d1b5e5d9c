#pragma once

#include <stdexcept>
#include <string>

namespace prefchoice {

enum class ErrorCode {
  kBetaOutOfRange,
  kBadSampleSize,
  kBadProbs,
  kBadCounts,
  kBadSelfLoops,
  kDuplicateVertex,
  kNonpositiveWeight,
  kUnknownVertex,
  kEmptyIndex,
  kNoCandidate,
  kTooLargeForOracle,
  kDomainError,
  kNotSupercritical,
  kNotCritical,
  kInsufficientData,
  kInvalidConfig,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace prefchoice
