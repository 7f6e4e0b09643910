#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace domarnet {

/// Stable error codes. The CLI prints `to_string(code)` so scripts can match on it.
enum class ErrorCode {
    DimensionMismatch,
    NegativeShare,
    ColumnSumViolation,
    KappaSumViolation,
    NonFiniteValue,
    InvalidArgument,
    ParseError,
    NeutralRegime,
    SingularNetwork,
    NonConvergence,
    NegativeEntry,
    NonSquare,
    DefectiveNetwork,
    SingularSolution,
    NonpositivePrice,
    IndexOutOfRange,
    SubmatrixSingular,
    OverlappingShocks,
    InternalInconsistency,
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NegativeShare: return "NegativeShare";
        case ErrorCode::ColumnSumViolation: return "ColumnSumViolation";
        case ErrorCode::KappaSumViolation: return "KappaSumViolation";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NeutralRegime: return "NeutralRegime";
        case ErrorCode::SingularNetwork: return "SingularNetwork";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::DefectiveNetwork: return "DefectiveNetwork";
        case ErrorCode::SingularSolution: return "SingularSolution";
        case ErrorCode::NonpositivePrice: return "NonpositivePrice";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::SubmatrixSingular: return "SubmatrixSingular";
        case ErrorCode::OverlappingShocks: return "OverlappingShocks";
        case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// One violated network invariant. `index` names the offending sector when there is one.
struct Violation {
    ErrorCode code;
    std::optional<std::size_t> index;
    double deviation = 0.0;
    std::string message;
};

/// Thrown by validate_network; carries every violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(violations.empty() ? ErrorCode::InvalidArgument : violations.front().code,
                join(violations)),
          violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<Violation>& vs) {
        std::string out;
        for (const auto& v : vs) {
            if (!out.empty()) out += "; ";
            out += std::string(to_string(v.code)) + " (" + v.message + ")";
        }
        return out;
    }

    std::vector<Violation> violations_;
};

/// Raised when an operation needs finite equilibrium prices and the network is singular.
class SingularNetworkError : public Error {
public:
    SingularNetworkError(const std::string& message, std::optional<double> determinant,
                         std::optional<std::size_t> step = std::nullopt)
        : Error(ErrorCode::SingularNetwork, message), determinant_(determinant), step_(step) {}

    std::optional<double> determinant() const noexcept { return determinant_; }
    /// Path step at which the composed shock crossed the frontier (integration checks only).
    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    std::optional<double> determinant_;
    std::optional<std::size_t> step_;
};

}  // namespace domarnet
