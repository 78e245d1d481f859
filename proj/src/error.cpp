#include "tangleflow/error.hpp"

namespace tangleflow {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MismatchedVertexSet: return "MismatchedVertexSet";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InvalidLattice: return "InvalidLattice";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::ZeroSignEntry: return "ZeroSignEntry";
    case ErrorCode::DegenerateSize: return "DegenerateSize";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::ZeroGap: return "ZeroGap";
    case ErrorCode::GapGuardTripped: return "GapGuardTripped";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::InvalidInitial: return "InvalidInitial";
    case ErrorCode::InconsistentHeightOrder: return "InconsistentHeightOrder";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::EntangledInput: return "EntangledInput";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonpositiveValue: return "NonpositiveValue";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SemanticError: return "SemanticError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> vertex)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), vertex_(vertex)
{
}

ParseError::ParseError(ErrorCode code, std::size_t line, std::size_t column, const std::string& message)
    : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line), column_(column)
{
}

} // namespace tangleflow
