#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netmeasure {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed edge-list, trace, label or config input.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Out-links requested for a node that has not been visited.
class AccessViolation : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// A quantity whose definition requires nonempty input (e.g. reciprocity of an edgeless graph).
class UndefinedValueError : public Error {
public:
    using Error::Error;
};

/// Ratio estimator with a zero denominator, or a trace with non-positive weights.
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace netmeasure
