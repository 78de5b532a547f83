#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rvspec {

enum class ErrorCode {
  NonFiniteEntry,
  EmptySample,
  InvalidR,
  GroupTooSmall,
  DegenerateGroup,
  AllKappaOne,
  ZeroVariance,
  DegenerateProportion,
  DimensionMismatch,
  InvalidT,
  InvalidAlpha,
  InvalidLevel,
  InvalidSecondOrder,
  DomainError,
  EmptyInput,
  InvalidModel,
  UnsupportedAlpha,
  InvalidDensity,
  EmptyExperiment,
  PreconditionViolation,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidR: return "InvalidR";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::AllKappaOne: return "AllKappaOne";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateProportion: return "DegenerateProportion";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidT: return "InvalidT";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::InvalidSecondOrder: return "InvalidSecondOrder";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::UnsupportedAlpha: return "UnsupportedAlpha";
    case ErrorCode::InvalidDensity: return "InvalidDensity";
    case ErrorCode::EmptyExperiment: return "EmptyExperiment";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Data-side failures (bad input) versus numeric/degeneracy failures; the CLI
/// maps these to distinct exit codes.
constexpr bool is_data_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteEntry:
    case ErrorCode::EmptySample:
    case ErrorCode::EmptyInput:
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::DimensionMismatch:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Carries the offending cell of a DataMatrix (0-based indices).
class NonFiniteEntryError : public Error {
 public:
  NonFiniteEntryError(std::size_t row, std::size_t column)
      : Error(ErrorCode::NonFiniteEntry, "non-finite value at row " + std::to_string(row) +
                                             ", column " + std::to_string(column)),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace rvspec
