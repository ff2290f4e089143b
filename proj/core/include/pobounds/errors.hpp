#pragma once

#include <stdexcept>
#include <string>

namespace pobounds {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// An event whose constraints cannot hold simultaneously (empty value set,
// conflicting (X, Y) evidence).
class ContradictionError : public Error {
public:
    using Error::Error;
};

// P(X = l, Y = m) = 0 (or P(X = l) = 0) where a division by it is required.
class UndefinedConditionalError : public Error {
public:
    using Error::Error;
};

// Data whose identification formulas produce negative masses.
class MiteIncompatibleError : public Error {
public:
    using Error::Error;
};

class SolverFailure : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class BootstrapFailure : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace pobounds
