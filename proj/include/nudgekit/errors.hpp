#pragma once

#include <stdexcept>
#include <string>

namespace nudgekit {

/// Invalid input data: malformed rows, unknown tags, broken invariants.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& message)
        : std::runtime_error(message) {}
};

/// Bad or inconsistent configuration (e.g. embedding dimension mismatch).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message)
        : std::runtime_error(message) {}
};

/// Filesystem failures: missing files, unreadable/unwritable paths.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& message)
        : std::runtime_error(message) {}
};

/// Lookup of an id that does not exist in a catalog or fixture store.
class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& message)
        : std::runtime_error(message) {}
};

/// Remote backend failure after retries are exhausted.
class ProviderError : public std::runtime_error {
public:
    ProviderError(const std::string& message, int http_status = 0)
        : std::runtime_error(message), http_status_(http_status) {}

    int http_status() const { return http_status_; }

private:
    int http_status_;
};

/// Numerical routine failed to converge.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& message)
        : std::runtime_error(message) {}
};

}  // namespace nudgekit
