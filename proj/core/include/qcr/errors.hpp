// Exception hierarchy shared by every qcr module.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// vee() received a matrix that is not antisymmetric within tolerance.
class NonSkewInput : public Error {
public:
    using Error::Error;
};

class SingularMixer : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// Desired force vector too small to extract a thrust direction.
class DegenerateThrust : public Error {
public:
    using Error::Error;
};

class IllConditioned : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario text. Carries the 1-based line number.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed scenario text with an invalid, missing or unknown key.
class ValidationError : public ConfigError {
public:
    ValidationError(std::string key, const std::string& what)
        : ConfigError(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IncompleteLog : public Error {
public:
    using Error::Error;
};

}  // namespace qcr
