#pragma once

#include <stdexcept>
#include <string>

namespace kerrcat {

/// Base for every library error. Numerical failures map to CLI exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidBasis : public Error {
 public:
  using Error::Error;
};

class BasisMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Detuning is not an even multiple of K, so the displaced frame does not block.
class NotBlockable : public Error {
 public:
  using Error::Error;
};

/// An eigenvector could not be assigned a definite photon-number parity.
class DegeneracyResolution : public Error {
 public:
  using Error::Error;
};

/// The two parity ground levels are split by more than the degeneracy tolerance.
class NonDegenerateGround : public Error {
 public:
  using Error::Error;
};

class InsufficientLevels : public Error {
 public:
  using Error::Error;
};

class IntegratorFailure : public Error {
 public:
  using Error::Error;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

class IllConditionedControl : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace kerrcat
