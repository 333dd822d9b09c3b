#pragma once

#include <stdexcept>
#include <string>

namespace xrsim {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid topology, duplicate names, bad parameters, dependency cycles.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A second producer tried to bind a topic that already has a writer.
class WriterConflictError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Publish attempted by something other than the topic's writer.
class PermissionError : public Error {
public:
    using Error::Error;
};

/// Timestamp regression on a stream.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// A synchronous reader queue exceeded its bound under the error policy.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-contract input data.
class InputError : public Error {
public:
    using Error::Error;
};

/// Image/buffer shape mismatch.
class DimensionError : public Error {
public:
    using Error::Error;
};

}  // namespace xrsim
