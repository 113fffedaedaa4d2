#pragma once

#include <stdexcept>
#include <string>

namespace memnet {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Linear system has no unique solution (a floating component or a
// non-finite conductance).
class SingularSystem : public Error {
public:
    using Error::Error;
};

class DisconnectedTerminals : public Error {
public:
    using Error::Error;
};

class SamplingFailure : public Error {
public:
    using Error::Error;
};

// Algorithm ran but produced nothing usable (for example no ON path).
class NoSolution : public Error {
public:
    using Error::Error;
};

// Entropy of a current distribution that carries no current.
class ZeroCurrent : public Error {
public:
    using Error::Error;
};

// A pulse ran out of steps before reaching steady state.
class NonConvergence : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace memnet
