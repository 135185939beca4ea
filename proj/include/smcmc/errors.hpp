#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace smcmc {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user configuration (bad file, unknown key,
/// wrong type, contradictory blocks). CLI exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

/// A caller violated a documented precondition: out-of-domain argument,
/// index out of range, shape mismatch. CLI exit code 2.
struct PreconditionError : Error {
  using Error::Error;
};

/// A numerical operation failed: degenerate eigensystem, singular resolvent,
/// non-finite evaluation, unstable integration. CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

namespace detail {

// Minimal variadic message builder; keeps error sites terse.
template <typename... Args>
std::string msg(const Args&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << args);
  return os.str();
}

}  // namespace detail

}  // namespace smcmc
