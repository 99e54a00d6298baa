#pragma once

#include <stdexcept>
#include <string>

namespace pks {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The input is valid but too extreme to be represented (e.g. g1^{-1} of a
/// density ratio so small that the bracket overflows).
class OutOfRangeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A rate function does not satisfy the monotone-rate hypothesis.
class InvalidRateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A criterion or bound is not applicable to the given data (the hypothesis
/// under which the bound holds is not met).
class NotApplicableError : public Error {
public:
    using Error::Error;
};

/// The mass is not supercritical (M <= 8*pi), so no blow-up criterion applies.
class SubcriticalMassError : public NotApplicableError {
public:
    using NotApplicableError::NotApplicableError;
};

/// A numerical routine failed to converge or produced a non-finite value.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace pks
