#pragma once

#include <stdexcept>
#include <string>

namespace lssclt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Cholesky of a covariance design hit a non-positive pivot.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// A variable with zero sample variance cannot be standardized.
class DegenerateVariable : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A test function returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Stieltjes transform requested on [-2, 2].
class BranchCutError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class DegenerateQuadratic : public Error {
 public:
  using Error::Error;
};

/// Imaginary residual of the contour integral exceeded tolerance.
class ContourAccuracyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo configuration refused as too expensive.
class GuardrailError : public Error {
 public:
  using Error::Error;
};

}  // namespace lssclt
