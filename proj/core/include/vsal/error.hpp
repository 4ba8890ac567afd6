#pragma once

#include <stdexcept>
#include <string>

namespace vsal {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument: size mismatch, out-of-range parameter, malformed invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Query set refers to an item or label outside the labeling matrix.
class InvalidQuery : public Error {
public:
    using Error::Error;
};

// An operation that conditions on the version space received an empty one
// (or one with zero prior mass).
class EmptyVersionSpace : public Error {
public:
    using Error::Error;
};

// Malformed text input (matrix files, query files, class spec strings).
class ParseError : public Error {
public:
    using Error::Error;
};

// Experiment configuration rejected; `field()` holds the JSON path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace vsal
