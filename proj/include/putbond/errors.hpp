#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace putbond {

enum class ErrorCode {
    InvalidInput,
    MalformedSequence,
    NotPositiveDefinite,
    NonIncreasingTimes,
    ExpiredOption,
    DomainError,
    BracketFailure,
    MultipleRoots,
    Degenerate,
    IndexOutOfRegime,
    DegenerateBond,
    UnstableScheme,
    ZeroPrice,
    UndefinedSpread,
    ConfigError,
    UnknownFigure,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the root finders; carries the coupon-date index that failed.
class BoundaryError : public Error {
public:
    BoundaryError(ErrorCode code, int index, const std::string& what)
        : Error(code, "coupon date " + std::to_string(index) + ": " + what), index_(index) {}

    int index() const noexcept { return index_; }

private:
    int index_;
};

}  // namespace putbond
