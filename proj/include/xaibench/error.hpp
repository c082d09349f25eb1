#pragma once

#include <stdexcept>
#include <string>

namespace xaibench {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kCorruptFile,
  kBadMagic,
  kDimensionMismatch,
  kNonFinite,
  kUnknownReference,
  kIncomplete,
};

const char* to_string(ErrorKind kind);

/// Every failure surfaced by the library carries a category so callers
/// (and the CLI exit code) can tell corrupt data from bad input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace xaibench
