#pragma once

#include <stdexcept>
#include <string>

namespace qlp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state value left the admissible interval O of a coefficient.
class RangeEscape : public Error {
public:
    RangeEscape(const std::string& what, double value, double time)
        : Error(what), value_(value), time_(time) {}
    double value() const noexcept { return value_; }
    double time() const noexcept { return time_; }

private:
    double value_;
    double time_;
};

/// Sampled ellipticity constant was not positive.
class NotElliptic : public Error {
public:
    NotElliptic(const std::string& what, double t, double x0, double x1, double y, double xi0, double xi1)
        : Error(what), t(t), x0(x0), x1(x1), y(y), xi0(xi0), xi1(xi1) {}
    double t, x0, x1, y, xi0, xi1;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class MaxPrincipleViolation : public Error {
public:
    using Error::Error;
};

/// Picard iteration failed to contract or left the ball X_{u0}(r, T).
class ContractionFailure : public Error {
public:
    ContractionFailure(const std::string& what, double factor, bool ball_exit)
        : Error(what), factor_(factor), ball_exit_(ball_exit) {}
    double factor() const noexcept { return factor_; }
    bool ball_exit() const noexcept { return ball_exit_; }

private:
    double factor_;
    bool ball_exit_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : Error(path + ": " + message), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace qlp
