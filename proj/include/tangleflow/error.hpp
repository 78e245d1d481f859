#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tangleflow {

enum class ErrorCode {
    InvalidArgument,
    // model
    MismatchedVertexSet,
    DisconnectedGraph,
    InvalidLattice,
    InvalidGraph,
    ZeroSignEntry,
    DegenerateSize,
    SingularSystem,
    SignViolation,
    // dynamics
    ZeroGap,
    GapGuardTripped,
    StepUnderflow,
    InvalidInitial,
    // topology
    InconsistentHeightOrder,
    IndexOutOfRange,
    // analysis
    NotSymmetric,
    EntangledInput,
    InsufficientSamples,
    NonpositiveValue,
    UnknownComponent,
    NotConverged,
    // io
    SyntaxError,
    SemanticError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure reported by the library. The code is
/// stable and meant for programmatic checks; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> vertex = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    /// Offending vertex, when the failure is tied to one (SignViolation, ZeroGap, ...).
    std::optional<std::size_t> vertex() const noexcept { return vertex_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> vertex_;
};

/// Design-file failure with a 1-based source position.
class ParseError : public Error {
public:
    ParseError(ErrorCode code, std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace tangleflow
