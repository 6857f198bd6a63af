#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pfsaddle {

enum class ErrorKind {
  invalid_value,     // NaN / Inf in a numeric input
  invalid_argument,  // out-of-range scalar parameter
  shape,             // mismatched matrix shapes
  topology,          // graph could not be built / is disconnected
  validation,        // matrix fails a structural check (symmetry, ...)
  config,            // experiment configuration rejected
  usage,             // bad CLI usage
  divergence,        // iterate blew up
  non_convergence,   // iteration cap exceeded
  io,                // filesystem failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

/// CLI exit code: 1 config/usage, 2 numerical failure, 3 I/O.
int exit_code_for(ErrorKind kind);

}  // namespace pfsaddle
