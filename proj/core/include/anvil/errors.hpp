#pragma once

#include <stdexcept>
#include <string>

namespace anvil {

/// Bad configuration or malformed arguments (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad or inconsistent data: malformed scans, schema mismatches,
/// insufficient fingerprints (CLI exit code 3).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values anywhere in a numeric pipeline (CLI exit code 4).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace anvil
