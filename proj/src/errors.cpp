#include "pfsaddle/errors.hpp"

namespace pfsaddle {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_value: return "invalid-value";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::shape: return "shape";
    case ErrorKind::topology: return "topology";
    case ErrorKind::validation: return "validation";
    case ErrorKind::config: return "config";
    case ErrorKind::usage: return "usage";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::divergence:
    case ErrorKind::non_convergence:
    case ErrorKind::invalid_value:
      return 2;
    case ErrorKind::io:
      return 3;
    default:
      return 1;
  }
}

}  // namespace pfsaddle
