#include "levyfit/error.hpp"

namespace levyfit {

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::InvalidArgument: return "invalid_argument";
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Schema: return "schema";
    case ErrorCategory::Domain: return "domain";
    case ErrorCategory::Data: return "data";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Numeric: return "numeric";
    case ErrorCategory::Optimizer: return "optimizer";
    case ErrorCategory::Singular: return "singular";
    case ErrorCategory::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace levyfit
