#pragma once

#include <stdexcept>
#include <string>

namespace intop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid or array sizes.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different radial grids.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Physical parameters outside their admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Richardson ladder whose successive estimates do not contract.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

/// Eigen- or linear solver failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Assembly would exceed the configured degree-of-freedom budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace intop
