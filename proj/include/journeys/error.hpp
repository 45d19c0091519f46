#pragma once

#include <stdexcept>
#include <string>

namespace journeys {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A concept vector carried a negative or non-finite weight.
class InvalidVector : public Error {
public:
    using Error::Error;
};

// A caller passed an argument outside the operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input data could not be parsed or violates a corpus invariant.
class DataError : public Error {
public:
    using Error::Error;
};

// The naming backend failed. `status()` is the HTTP status, or 0 for a
// transport failure.
class BackendError : public Error {
public:
    BackendError(const std::string& what, int status)
        : Error(what), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

}  // namespace journeys
