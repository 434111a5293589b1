#pragma once

#include <stdexcept>
#include <string>

namespace nsalpha {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
    invalid_mode,
    dimension,
    configuration,
    diverged,
    range,
    invalid_psi,
    precondition,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when the integrator produces non-finite coefficients.
class DivergedError : public Error {
public:
    DivergedError(double time, const std::string& what)
        : Error(ErrorKind::diverged, what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace nsalpha
