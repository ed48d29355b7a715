#pragma once

#include <stdexcept>
#include <string>

namespace ivridge {

enum class ErrorCode {
  domain,             // argument outside the mathematical domain
  contract,           // caller broke a precondition (shapes, lengths)
  singularity,        // evaluation at a pole
  solver,             // iterative solver did not converge
  degenerate_signal,  // estimator denominator vanishes
  unsupported,        // well-defined request the library declines (e.g. gamma >= 1)
  config,             // malformed configuration or CLI input
  io,                 // file system / parse failures on data files
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the Silverstein solver; keeps the residual of the last iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(ErrorCode::solver, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ivridge
