/// @file error.hpp
/// @brief Exception types used across nmhd.
#pragma once

#include <stdexcept>
#include <string>

namespace nmhd {

/// Base class for all nmhd errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments (grid sizes, operator/arity mismatches, ranges).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Non-finite coefficients detected during time stepping.
class BlowUpError : public Error {
public:
    BlowUpError(double t, const std::string& where)
        : Error("blow-up at t=" + std::to_string(t) + " (" + where + ")"), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Configuration schema violations. `key()` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : what + " (key: " + key + ")"), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Snapshot I/O failures, each kind distinct.
class SnapshotError : public Error {
public:
    enum class Kind { io, bad_magic, version_mismatch, truncated_payload, malformed };
    SnapshotError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace nmhd
