#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace salc {

enum class ErrorCode {
    LengthMismatch,
    WeightSumError,
    EmptyCriteria,
    OutOfRange,
    EmptyField,
    MalformedOutput,
    NonMonotonicNumbering,
    AmbiguousVerdict,
    TransportError,
    RateLimited,
    ExhaustedRetries,
    ZeroVariance,
    AllTied,
    EmptyInput,
    SchemaError,
    DuplicateId,
    TooFewResponses,
    IoError,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in this library is thrown as an Error carrying a stable
/// ErrorCode; callers dispatch on code(), messages are for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace salc
