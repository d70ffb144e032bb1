#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mre {

enum class ErrorKind {
  SingularDesign,
  BadReplication,
  DimensionMismatch,
  InvalidParameter,
  DegenerateBlock,
  WrongShape,
  NotEstimable,
  ZeroVariance,
  IncompatiblePair,
  BoundExceeded,
  Domain,
  Parse,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-checkable kind so
/// callers (tests, the CLI) can branch on it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mre
