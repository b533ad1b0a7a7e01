#pragma once

#include <stdexcept>
#include <string>

namespace cyber {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or input violates a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A well-formed model cannot be evaluated (explosive process, ODE failure,
/// state-space cap, infeasible constraint set, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) throw ValidationError(message);
}

}  // namespace cyber
