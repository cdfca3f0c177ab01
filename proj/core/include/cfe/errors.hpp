#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cfe {

/// Invalid or inconsistent input: mismatched lattices, bad parameters, basis/params mismatch.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value that cannot be represented (e.g. exp(G) overflowing). Carries the exponent
/// so callers can fall back to log space.
class RangeError : public std::range_error {
 public:
  RangeError(const std::string& what, std::complex<double> exponent)
      : std::range_error(what), exponent_(exponent) {}

  std::complex<double> exponent() const noexcept { return exponent_; }

 private:
  std::complex<double> exponent_;
};

/// Eigensolver or root-finder failure, including residual/degeneracy guards.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace cfe
