#pragma once

#include <stdexcept>
#include <string>

namespace blgi {

/// Argument outside the documented domain of an operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Kraus branch whose probability is numerically zero was asked to be renormalized.
class ZeroProbabilityBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature failed to converge, or a state drifted outside its invariants.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds what an exhaustive method can enumerate.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blgi
