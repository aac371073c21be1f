#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sysdse {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid enumeration bounds, sampling ranges or hyperparameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// No entry of a label table satisfies the query's constraint.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Mismatched lengths or arities between related inputs.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent dataset content.
class DataError : public Error {
public:
    using Error::Error;

    DataError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    /// 1-based line number in the offending file, 0 if not file-related.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// Raw feature outside the encoder's declared domain.
class EncodingError : public Error {
public:
    using Error::Error;
};

/// Unreadable, truncated or inconsistent model checkpoint.
class CheckpointError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sysdse
