#pragma once

#include <stdexcept>
#include <string>

namespace toedit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures; the message always names the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input data (corpus records, prior containers, profiles).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Anything that went wrong talking to a remote prior.
class ProviderError : public Error {
public:
    using Error::Error;
};

/// The provider could not be reached or did not answer in time.
class TransportError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// The provider answered, but the answer breaks the wire contract.
class ConformanceError : public ProviderError {
public:
    ConformanceError(std::string rule, const std::string& detail)
        : ProviderError(rule + ": " + detail), rule_(std::move(rule)) {}

    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

}  // namespace toedit
