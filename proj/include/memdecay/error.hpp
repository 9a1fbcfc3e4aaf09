#pragma once

#include <stdexcept>
#include <string>

namespace memdecay {

/// Failure categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  parameter_domain,
  admissibility,
  tail_undefined,
  cfl_violation,
  instability,
  unsupported_oracle,
  family_undefined,
  improved_bound_unavailable,
  domain,
  fit_domain,
  config,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the simulator when a sample becomes non-finite.
class InstabilityError : public Error {
 public:
  InstabilityError(std::size_t step, const std::string& what)
      : Error(ErrorKind::instability, what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace memdecay
