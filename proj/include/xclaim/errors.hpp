#pragma once

#include <stdexcept>
#include <string>

namespace xclaim {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file or record; carries the 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, long line = 0)
        : Error(with_line(what, line)), line_(line) {}

    long line() const noexcept { return line_; }

private:
    static std::string with_line(const std::string& what, long line) {
        if (line <= 0) return what;
        return "line " + std::to_string(line) + ": " + what;
    }

    long line_ = 0;
};

// Input violates a documented invariant (dangling reference, bad range, ...).
class ValidationError : public Error {
    using Error::Error;
};

// Invalid configuration: unsupported language pair, bad threshold, ...
class ConfigError : public Error {
    using Error::Error;
};

// A backend lacks a capability required by the requested operation.
class CapabilityError : public Error {
    using Error::Error;
};

// Transport-level failure talking to an external service, after retries.
class TransportError : public Error {
    using Error::Error;
};

}  // namespace xclaim
