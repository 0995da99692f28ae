#pragma once

#include <stdexcept>
#include <string>

namespace segstat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad data, bad arguments).
/// The CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A statistic is undefined for the given input (zero marginal, zero
/// variance, singular covariance).
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace segstat
