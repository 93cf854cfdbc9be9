#pragma once

#include <stdexcept>
#include <string>

namespace datadesc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class MalformedInputError : public Error {
public:
    using Error::Error;
};

class ContractViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Raised by the gateway once every retry has failed; carries the last cause.
class ProviderUnavailable : public Error {
public:
    ProviderUnavailable(const std::string& message, std::string last_cause)
        : Error(message + ": " + last_cause), last_cause_(std::move(last_cause)) {}

    const std::string& last_cause() const noexcept { return last_cause_; }

private:
    std::string last_cause_;
};

/// Transient failure of one provider attempt. Retried by the gateway.
class TransportError : public Error {
public:
    using Error::Error;
};

class SemanticParseError : public Error {
public:
    SemanticParseError(const std::string& message, std::string raw_response)
        : Error(message), raw_response_(std::move(raw_response)) {}

    const std::string& raw_response() const noexcept { return raw_response_; }

private:
    std::string raw_response_;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class EmptyCorpusError : public Error {
public:
    using Error::Error;
};

class ScoringParseError : public Error {
public:
    ScoringParseError(const std::string& message, std::string raw_response)
        : Error(message), raw_response_(std::move(raw_response)) {}

    const std::string& raw_response() const noexcept { return raw_response_; }

private:
    std::string raw_response_;
};

}  // namespace datadesc
