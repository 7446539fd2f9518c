#include "gengsp/error.hpp"

namespace gengsp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DependentColumns: return "DependentColumns";
    case ErrorCode::InfeasiblePartition: return "InfeasiblePartition";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::UnboundedFreqLabel: return "UnboundedFreqLabel";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::CutoffOutOfRange: return "CutoffOutOfRange";
    case ErrorCode::PlanFailed: return "PlanFailed";
    case ErrorCode::DegenerateFactorization: return "DegenerateFactorization";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NotSymmetric:
    case ErrorCode::DependentColumns:
    case ErrorCode::InfeasiblePartition:
    case ErrorCode::QuadratureUnderResolved:
    case ErrorCode::UnboundedFreqLabel:
    case ErrorCode::PlanFailed:
    case ErrorCode::DegenerateFactorization:
    case ErrorCode::RankDeficient:
        return true;
    default:
        return false;
    }
}

}  // namespace gengsp
