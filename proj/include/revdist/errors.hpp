#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revdist {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad run configuration: unknown metric, missing template, invalid flag combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed corpus or report data. Carries the 1-based line number when known.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// No structured payload could be recovered from a model response.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Transport, HTTP, or auth failure talking to a backend.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& message, int status = 0)
        : Error(message), status_(status) {}

    int status() const { return status_; }

private:
    int status_;
};

/// 429 responses that survived every retry.
class RateLimited : public BackendError {
public:
    explicit RateLimited(const std::string& message) : BackendError(message, 429) {}
};

/// Replay backend saw a fingerprint that is not in the transcript.
class ReplayMiss : public Error {
public:
    using Error::Error;
};

} // namespace revdist
