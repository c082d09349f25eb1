#include "xaibench/error.hpp"

namespace xaibench {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kCorruptFile: return "corrupt file";
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kNonFinite: return "non-finite value";
    case ErrorKind::kUnknownReference: return "unknown sample reference";
    case ErrorKind::kIncomplete: return "incomplete input";
  }
  return "error";
}

}  // namespace xaibench
