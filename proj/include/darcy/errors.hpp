#pragma once

#include <stdexcept>
#include <string>

namespace darcy {

/// Bad argument or violated precondition.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed on-disk data (field files, CSVs). Carries a best-effort byte
/// or line location in the message.
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Configuration file problem; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace darcy
