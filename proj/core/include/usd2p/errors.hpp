#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace usd2p {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/space shape disagreement (dimension or arity).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Invalid construction parameter (out-of-range q, p, epsilon, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation was checked and found false.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Operation needs at least two points in its domain.
class DegenerateDomainError : public Error {
public:
    using Error::Error;
};

/// Text input could not be parsed. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A request exceeds what a method can handle (e.g. grid too large).
class CapabilityRefusal : public Error {
public:
    using Error::Error;
};

/// A check that must hold when all upstream invariants hold did not.
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

/// A search finished without finding the requested object.
class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace usd2p
