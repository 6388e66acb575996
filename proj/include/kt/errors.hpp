#pragma once

#include <stdexcept>
#include <string>

namespace kt {

/// Base of every error thrown by the library. The CLI maps the three
/// subclasses onto exit codes 2, 3 and 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: dimension mismatch, parse failure.
class InputError : public Error {
public:
    using Error::Error;
};

/// Input is well formed but outside an operation's domain (singular point,
/// trivial tensor, degenerate orbit, incompatible potential, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace kt
