#pragma once

#include <stdexcept>
#include <string>

namespace overtaking {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The model (or a strategy for it) violates a structural precondition.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Malformed external input. `location` is a JSON pointer or a CSV line reference.
class ParseError : public Error {
public:
    ParseError(const std::string& location, const std::string& message)
        : Error(location.empty() ? message : location + ": " + message), location_(location) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

/// A numerical routine failed to converge or two independent routes disagree.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An enumeration exceeded its configured size cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

} // namespace overtaking
