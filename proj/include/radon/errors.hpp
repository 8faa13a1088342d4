#pragma once

#include <stdexcept>
#include <string>

namespace radon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An atom or shifted point lies outside the box domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A nonnegative measure was expected.
class SignError : public Error {
 public:
  using Error::Error;
};

/// Total masses do not match (or a zero-mass measure was expected).
class MassError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// An atom of the measure is not on the level set |p| = alpha.
class InconsistentStationarity : public Error {
 public:
  using Error::Error;
};

/// Second-order certificates need every atom in the interior.
class BoundaryAtomError : public Error {
 public:
  using Error::Error;
};

/// A direction carries negative mass on a touching set.
class ConeViolation : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Malformed configuration; the message names the offending field or line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace radon
