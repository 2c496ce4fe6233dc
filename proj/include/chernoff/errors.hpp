#pragma once

#include <stdexcept>
#include <string>

namespace chernoff {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the documented domain of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested evaluation would overflow a double.
class OverflowDomain : public Error {
 public:
  using Error::Error;
};

/// The evaluation scheme cannot meet the requested absolute error.
class AccuracyUnreachable : public Error {
 public:
  using Error::Error;
};

/// I(j,k,l) with l <= k: the integrand does not decay along the contour.
class NotIntegrable : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of panels before reaching its tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// The integration line does not pass to the right of the Airy zeros.
class ContourTooLeft : public Error {
 public:
  using Error::Error;
};

class UnknownStatistic : public Error {
 public:
  using Error::Error;
};

}  // namespace chernoff
