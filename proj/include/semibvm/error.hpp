#pragma once

#include <stdexcept>
#include <string>

namespace semibvm {

enum class ErrorKind {
  InvalidInput,
  Numerical,
  DegenerateDesign,
  ContractViolation,
  Io,
  Experiment,
};

const char *to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

inline const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InvalidInput:
    return "invalid input";
  case ErrorKind::Numerical:
    return "numerical error";
  case ErrorKind::DegenerateDesign:
    return "degenerate design";
  case ErrorKind::ContractViolation:
    return "contract violation";
  case ErrorKind::Io:
    return "I/O error";
  case ErrorKind::Experiment:
    return "experiment error";
  }
  return "error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

} // namespace semibvm
