#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twochoices {

enum class ErrorCode {
  kInvalidArgument,
  kGenerationFailure,
  kNumerical,
  kDegenerate,
  kReducible,
  kDivergence,
  kSizeCap,
  kSandwichViolation,
  kParse,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() distinguishes
// the failure class so callers can react (e.g. retry a generator).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace twochoices
