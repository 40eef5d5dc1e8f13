#pragma once

#include <stdexcept>
#include <string>

namespace pickmap {

/// Malformed or inconsistent input: wrong dimension, point outside the
/// ball, duplicate nodes, bad configuration.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that cannot be completed at the requested accuracy
/// (rank-deficient Gram past the jitter ladder, integrand blow-up,
/// failed certification of a precondition).
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace pickmap
