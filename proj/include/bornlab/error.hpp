#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bornlab {

/// Failure categories shared by every module. The string form is what
/// appears in reports and CLI diagnostics.
enum class ErrorKind {
    InvalidDimension,
    InvalidPartition,
    TypeMismatch,
    InvalidOperator,
    NotInContextAlgebra,
    InvalidState,
    InvalidTags,
    MissingTags,
    NotApplicable,
    InvalidPath,
    UnderdeterminedFit,
    InvalidDims,
    InvalidSplit,
    InvalidScaling,
    InvalidSpec,
    SizeLimit,
    InvalidGrid,
    UnknownIdentifier,
    ParseError,
    Inconsistent,
    UndefinedArithmetic,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidPartition: return "invalid-partition";
    case ErrorKind::TypeMismatch: return "type-mismatch";
    case ErrorKind::InvalidOperator: return "invalid-operator";
    case ErrorKind::NotInContextAlgebra: return "not-in-context-algebra";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::InvalidTags: return "invalid-tags";
    case ErrorKind::MissingTags: return "missing-tags";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::InvalidPath: return "invalid-path";
    case ErrorKind::UnderdeterminedFit: return "underdetermined-fit";
    case ErrorKind::InvalidDims: return "invalid-dims";
    case ErrorKind::InvalidSplit: return "invalid-split";
    case ErrorKind::InvalidScaling: return "invalid-scaling";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::SizeLimit: return "size-limit";
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::UnknownIdentifier: return "unknown-identifier";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::UndefinedArithmetic: return "undefined-arithmetic";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
          kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

} // namespace bornlab
