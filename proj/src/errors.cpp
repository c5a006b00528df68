#include "putbond/errors.hpp"

namespace putbond {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MalformedSequence: return "MalformedSequence";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonIncreasingTimes: return "NonIncreasingTimes";
    case ErrorCode::ExpiredOption: return "ExpiredOption";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::IndexOutOfRegime: return "IndexOutOfRegime";
    case ErrorCode::DegenerateBond: return "DegenerateBond";
    case ErrorCode::UnstableScheme: return "UnstableScheme";
    case ErrorCode::ZeroPrice: return "ZeroPrice";
    case ErrorCode::UndefinedSpread: return "UndefinedSpread";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    }
    return "Unknown";
}

}  // namespace putbond
