#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace que {

enum class ErrorKind {
  Validation,          // malformed input (bad word letter, bad config key)
  Domain,              // argument outside the mathematical domain of an operation
  ResourceLimit,       // requested level beyond the configured cap
  Precondition,        // a hypothesis of a proposition is not met
  Numerical,           // factorization failure and similar internal numerical failures
  Configuration,       // invalid obstacle layout or run configuration
  UnsupportedReference,
  DegenerateCluster,
  IllConditionedWindow,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace que
