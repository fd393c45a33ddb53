#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eyelstm {

// Base for everything this library throws on bad data or misuse.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed content in a text stream; carries the 1-based offending line.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    std::size_t line;
};

// Wrong file framing: missing header, bad magic, unsupported version, truncation.
struct FormatError : Error {
    using Error::Error;
};

// A value or argument violates a stated precondition or invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Array or tensor shapes do not line up.
struct DimensionError : Error {
    using Error::Error;
};

// Operation called in the wrong order (e.g. backward before forward).
struct StateError : Error {
    using Error::Error;
};

// Non-finite value where a finite one is required.
struct NumericError : Error {
    using Error::Error;
};

// Training loss became non-finite; names the epoch where it happened.
struct DivergenceError : Error {
    DivergenceError(const std::string& msg, int epoch)
        : Error(msg + " (epoch " + std::to_string(epoch) + ")"), epoch(epoch) {}
    int epoch;
};

// Inconsistent configuration (wrong model kind, bad widths, ...).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace eyelstm
