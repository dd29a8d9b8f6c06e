#pragma once

#include <stdexcept>
#include <string>

namespace prodnormal {

/// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Caller violated a documented precondition (e.g. nonzero mean passed to a zero-mean formula).
struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The density diverges at the requested point.
struct singular_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// A result or intermediate is not representable even in log space.
struct nonfinite_error : std::overflow_error {
  using std::overflow_error::overflow_error;
};

/// Root bracketing did not straddle the target.
struct bracket_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An order-statistic block is too small for the requested level.
struct insufficient_block_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// A configured memory budget would be exceeded.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace prodnormal
