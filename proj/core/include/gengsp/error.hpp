#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gengsp {

enum class ErrorCode {
    NotSymmetric,
    DimensionMismatch,
    DependentColumns,
    InfeasiblePartition,
    OutOfDomain,
    QuadratureUnderResolved,
    BasisMismatch,
    ContextMismatch,
    UnboundedFreqLabel,
    NotRepresentable,
    CutoffOutOfRange,
    PlanFailed,
    DegenerateFactorization,
    RankDeficient,
    InvalidArgument,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of the numerics (rank, quadrature, solver) as opposed
/// to malformed input. The CLI maps these to a distinct exit status.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace gengsp
