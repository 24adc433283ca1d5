#pragma once

#include <stdexcept>
#include <string>

namespace manelab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller violated a documented precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A numeric procedure failed to converge or overflowed.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A matrix or polynomial violates one of the admissibility conditions
/// (complex, negative, repeated, rational or unit-modulus eigenvalue).
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// A geometric constraint failed (ball does not embed, support escapes).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// The entropy-gap inequality does not hold for the requested parameters.
class InequalityError : public Error {
public:
    explicit InequalityError(const std::string& msg, double value)
        : Error(msg), value(value) {}
    double value;
};

/// det(A - I) = 0: fixed points are not isolated.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// The pseudo-orbit is too coarse for the certified uniqueness regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Inverting the semiconjugacy (or one map step) did not converge.
class InversionError : public Error {
public:
    using Error::Error;
};

/// The center profile equation could not be bracketed.
class ProfileError : public Error {
public:
    using Error::Error;
};

/// A statistical sanity check failed (e.g. resample rate too high).
class AnomalyError : public Error {
public:
    using Error::Error;
};

/// Configuration file or CLI input is malformed.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace manelab
