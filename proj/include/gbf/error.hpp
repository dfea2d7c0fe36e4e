#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbf {

enum class ErrorKind {
    // graph construction
    InvalidEdge,
    DegenerateVertex,
    SizeOverflow,
    DisconnectedGraph,
    // linear algebra
    ConvergenceFailure,
    DimensionMismatch,
    NonFiniteFilterValue,
    InvalidCenter,
    NotPositiveDefinite,
    SingularSystem,
    SingularSubkernel,
    KernelNotPositive,
    NonFinite,
    // features and parameters
    AlphaOutOfRange,
    EmptyPointCloud,
    InvalidParameter,
    LabelsInconsistent,
    // input/output
    ParseError,
    UnknownLabel,
    IoError,
    ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidEdge: return "InvalidEdge";
    case ErrorKind::DegenerateVertex: return "DegenerateVertex";
    case ErrorKind::SizeOverflow: return "SizeOverflow";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteFilterValue: return "NonFiniteFilterValue";
    case ErrorKind::InvalidCenter: return "InvalidCenter";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::SingularSubkernel: return "SingularSubkernel";
    case ErrorKind::KernelNotPositive: return "KernelNotPositive";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::EmptyPointCloud: return "EmptyPointCloud";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::LabelsInconsistent: return "LabelsInconsistent";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Coarse classification used for process exit codes.
enum class ErrorClass { Config, Data, Numerical };

constexpr ErrorClass classify_error(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidParameter:
    case ErrorKind::AlphaOutOfRange:
        return ErrorClass::Config;
    case ErrorKind::ParseError:
    case ErrorKind::UnknownLabel:
    case ErrorKind::IoError:
    case ErrorKind::EmptyPointCloud:
    case ErrorKind::InvalidEdge:
    case ErrorKind::DegenerateVertex:
    case ErrorKind::DisconnectedGraph:
    case ErrorKind::InvalidCenter:
    case ErrorKind::LabelsInconsistent:
    case ErrorKind::SizeOverflow:
        return ErrorClass::Data;
    default:
        return ErrorClass::Numerical;
    }
}

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace detail
}  // namespace gbf
