#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fqlems {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a model (e.g. i_fc >= i_lim).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested value outside an admissible operating range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Battery power demand larger than V_oc^2 / (4 R_bat).
class InfeasiblePowerError : public Error {
public:
    using Error::Error;
};

/// Weighted average over all-zero firing strengths.
class DegenerateError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

/// API misuse, e.g. stepping a terminated episode.
class UsageError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

}  // namespace fqlems
