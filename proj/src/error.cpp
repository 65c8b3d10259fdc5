#include "hopfreeb/error.hpp"

namespace hopfreeb {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ModulusOrder: return "ModulusOrder";
    case ErrorCode::ResonanceConstraint: return "ResonanceConstraint";
    case ErrorCode::SearchBoundExceeded: return "SearchBoundExceeded";
    case ErrorCode::OriginExcluded: return "OriginExcluded";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::NotExpanding: return "NotExpanding";
    case ErrorCode::MatchingFailure: return "MatchingFailure";
    case ErrorCode::WindowExceeded: return "WindowExceeded";
    case ErrorCode::ZeroCoupling: return "ZeroCoupling";
    case ErrorCode::EquationViolated: return "EquationViolated";
    case ErrorCode::DegreeBoundExceeded: return "DegreeBoundExceeded";
    case ErrorCode::WrongSolutionSpace: return "WrongSolutionSpace";
    case ErrorCode::ResidualFailure: return "ResidualFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace hopfreeb
