#pragma once

#include <stdexcept>
#include <string>

namespace hlearn {

// Bad or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed state payload for the given domain spec.
struct MalformedStateError : std::runtime_error {
    explicit MalformedStateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint / file format problems (CLI exit code 4).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint domain does not match the requesting run.
struct DomainMismatchError : std::runtime_error {
    explicit DomainMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

// IO failure (CLI exit code 4).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training divergence or other runtime abort (CLI exit code 3).
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hlearn
