#pragma once

#include <stdexcept>
#include <string>

namespace trbie {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input or configuration (maps to CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented region of a special function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a kernel or function singularity (x = y, z = 0).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Wavenumber on (or numerically adjacent to) a waveguide branch cut.
class BranchCutError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A contour quadrature node landed on (or next to) an eigenvalue.
class ContourHitsEigenvalueError : public Error {
 public:
  using Error::Error;
};

class IncompleteRootsError : public Error {
 public:
  using Error::Error;
};

/// Transmittance/reflectance outside [0, 1]; indicates a solver bug.
class EnergyViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace trbie
