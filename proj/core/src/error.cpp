#include "twochoices/error.hpp"

namespace twochoices {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kGenerationFailure: return "generation-failure";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kReducible: return "reducible-chain";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kSizeCap: return "size-cap";
    case ErrorCode::kSandwichViolation: return "sandwich-violation";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

}  // namespace twochoices
