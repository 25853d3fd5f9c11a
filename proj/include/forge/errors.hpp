#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Malformed input data (bad row, bad JSON, schema violation).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, long line = -1)
        : std::runtime_error(line >= 0 ? message + " (line " + std::to_string(line) + ")"
                                       : message),
          line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

// Inputs parsed fine but violate a contract (duplicate id, clip mismatch, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& message) : std::runtime_error(message) {}
};

// Bad configuration or usage.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// All retries exhausted against the generation endpoint.
class NetworkError : public std::runtime_error {
public:
    explicit NetworkError(const std::string& message) : std::runtime_error(message) {}
};

} // namespace forge
