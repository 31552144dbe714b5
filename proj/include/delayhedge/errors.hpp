// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace delayhedge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violate a model invariant (e.g. delay >= n).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A computation that theory guarantees to be well posed went numerically wrong.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Problem too large for an enumeration-based routine.
class SizeError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t expected, std::size_t got)
        : Error("length mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

/// E[exp(-V)] diverges: the Gaussian integral of the exponentiated quadratic is infinite.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

class OptimizerFailure : public Error {
public:
    using Error::Error;
};

}  // namespace delayhedge
