#pragma once

#include <stdexcept>
#include <string>

namespace netr {

/// Bad input data: malformed rows, out-of-range values, dangling ids.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller misuse: invalid parameters, unknown query user, bad flag values.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An internal structural invariant failed. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

} // namespace netr
