#pragma once

#include <stdexcept>
#include <string>

namespace grl {

// Machine-readable failure codes. The CLI maps DomainError -> exit 1,
// IoError -> exit 2, and prints the code name alongside the message.
enum class ErrorCode {
  BallTooLarge,
  ShapeError,
  SingularCenter,
  BranchCut,
  DegenerateShell,
  Inapplicable,
  InsufficientResolution,
  LedgerExhausted,
  RefinementBreaksCover,
  AuditUndefined,
  PreconditionFailed,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace grl
