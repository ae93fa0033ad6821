#pragma once

#include <stdexcept>
#include <string>

namespace levyfit {

// Categories map one-to-one onto the C API status codes.
enum class ErrorCategory {
  InvalidArgument,
  Parse,
  Schema,
  Domain,
  Data,
  Io,
  Numeric,
  Optimizer,
  Singular,
  Internal,
};

const char* category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

inline void require(bool condition, ErrorCategory category, const std::string& message) {
  if (!condition) throw Error(category, message);
}

}  // namespace levyfit
