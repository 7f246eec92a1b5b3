#pragma once

#include <stdexcept>
#include <string>

namespace gabm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IntegrityError : Error {
    using Error::Error;
};

struct OutOfRangeError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// The reply carried no usable color, or both colors in the fallback window.
struct AmbiguousReply : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

struct AuthError : TransportError {
    using TransportError::TransportError;
};

struct CacheMiss : TransportError {
    using TransportError::TransportError;
};

struct OracleParseError : Error {
    using Error::Error;
};

enum class FailureCause { Ambiguous, Transport, Other };

struct RunFailed : Error {
    RunFailed(int day, std::string agent, FailureCause cause, const std::string& detail)
        : Error("run failed on day " + std::to_string(day) + " for agent " + agent + ": " + detail),
          day(day),
          agent(std::move(agent)),
          cause(cause) {}

    int day;
    std::string agent;
    FailureCause cause;
};

struct BatchFailed : Error {
    BatchFailed(const std::string& what, FailureCause cause) : Error(what), cause(cause) {}
    FailureCause cause;
};

struct SingularDesign : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

} // namespace gabm
