#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sofred {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluator produced a non-finite value or was called outside its domain.
class EvaluationDomainError : public Error {
public:
    using Error::Error;
};

// A test sequence did not stabilize within the iteration budget.
class FiberDivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

// Orbit left the guard range. Dynamics detection catches this.
class OrbitEscape : public RangeError {
public:
    using RangeError::RangeError;
};

class IndeterminateDynamicsError : public Error {
public:
    using Error::Error;
};

class AdmissibilityError : public Error {
public:
    using Error::Error;
};

class NoCertificateError : public Error {
public:
    using Error::Error;
};

class SeriesDivergenceError : public Error {
public:
    using Error::Error;
};

class ContextError : public Error {
public:
    using Error::Error;
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " at position " + std::to_string(pos)), position(pos), reason(msg) {}
    std::size_t position;
    std::string reason; // message without the position suffix

};

} // namespace sofred
