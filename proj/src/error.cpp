#include "qkdguess/error.hpp"

namespace qkdguess {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularDirection: return "SingularDirection";
    case ErrorKind::InfeasibleRates: return "InfeasibleRates";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoCrossing: return "NoCrossing";
  }
  return "Unknown";
}

}  // namespace qkdguess
