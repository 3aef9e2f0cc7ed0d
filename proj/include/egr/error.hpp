#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace growth {

/// Machine-readable failure categories. Every exception thrown by the
/// library carries exactly one of these.
enum class ErrorCode {
    ZeroOnSupport,
    BoundaryPoint,
    DimensionMismatch,
    DomainViolation,
    GeneratorViolation,
    TangencyViolation,
    NoConvergence,
    QuadratureFailure,
    ParseError,
    NonPositiveReturn,
    RaggedRows,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ZeroOnSupport: return "ZeroOnSupport";
        case ErrorCode::BoundaryPoint: return "BoundaryPoint";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DomainViolation: return "DomainViolation";
        case ErrorCode::GeneratorViolation: return "GeneratorViolation";
        case ErrorCode::TangencyViolation: return "TangencyViolation";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonPositiveReturn: return "NonPositiveReturn";
        case ErrorCode::RaggedRows: return "RaggedRows";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

namespace detail {

inline void require(bool cond, ErrorCode code, const char* what) {
    if (!cond) throw Error(code, what);
}

}  // namespace detail
}  // namespace growth
