#pragma once

#include <stdexcept>
#include <string>

namespace cptmdp {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document; `where` is a JSON path or line context.
class ParseError : public Error {
public:
    ParseError(const std::string& where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what) {}
};

/// Input is well-formed but violates a model or parameter invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside a function's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside a solver.
class SolverError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public SolverError {
public:
    SingularMatrix() : SolverError("singular matrix") {}
};

class IterationLimit : public SolverError {
public:
    IterationLimit() : SolverError("simplex iteration limit reached") {}
};

class InfeasiblePoint : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace cptmdp
