#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace distreg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad shape, bad id, malformed file).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (singular system, no convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Simplex QP hit its iteration budget. Carries the last iterate for diagnostics.
class QpNotConverged : public NumericalError {
 public:
  QpNotConverged(const std::string& what, std::vector<double> last_iterate,
                 double kkt_residual, int iterations)
      : NumericalError(what),
        last_iterate_(std::move(last_iterate)),
        kkt_residual_(kkt_residual),
        iterations_(iterations) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double kkt_residual() const noexcept { return kkt_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> last_iterate_;
  double kkt_residual_;
  int iterations_;
};

}  // namespace distreg
