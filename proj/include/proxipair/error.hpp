#pragma once

#include <stdexcept>
#include <string>

namespace proxipair {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, invalid body parameters, unknown names.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
    DimensionMismatch(std::size_t expected, std::size_t actual)
        : InvalidArgument("dimension mismatch: expected " + std::to_string(expected) +
                          ", got " + std::to_string(actual)) {}
};

/// The (body variant, exponent) combination has no supported projection.
class Unsupported : public Error {
public:
    using Error::Error;
};

/// An inner iterative routine hit its iteration cap before reaching tolerance.
class NotConverged : public Error {
public:
    NotConverged(const std::string& what, double achieved)
        : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// A point was handed to an operator outside its domain, or a solver
/// precondition failed.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace proxipair
