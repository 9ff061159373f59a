#pragma once

#include <stdexcept>
#include <string>

namespace omv {

/// Argument shapes or preconditions do not line up (dimension mismatch etc).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Parameters rejected at construction time.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Sampling from an empty set.
class EmptySetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant was found broken. Never expected in a correct build.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input too large for an exhaustive procedure.
class ScaleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed user input (files, strings, symbols).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw ContractViolation(what);
}

}  // namespace detail

}  // namespace omv
