#pragma once

#include <stdexcept>
#include <string>

namespace kpplab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The numerical integration cannot continue: stability bound exceeded,
/// non-finite values, maximum-principle breach, boundary leak or mass loss.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The problem is outside the class a certificate is defined for.
class HypothesisMismatch : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested measurement (no level crossing,
/// too few snapshots, empty window after filtering).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace kpplab
