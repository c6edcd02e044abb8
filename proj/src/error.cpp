#include "herd/error.hpp"

namespace herd {

namespace {

std::string decorate(const std::string& message, const Location& where) {
  if (where.file.empty() && !where.row && !where.column) return message;
  std::string out = message + " [";
  std::string sep;
  if (!where.file.empty()) {
    out += where.file;
    sep = ", ";
  }
  if (where.row) {
    out += sep + "row " + std::to_string(*where.row);
    sep = ", ";
  }
  if (where.column) out += sep + "column '" + *where.column + "'";
  return out + "]";
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::UnparseableValue: return "UnparseableValue";
    case ErrorCode::UnparseableDate: return "UnparseableDate";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::DateMismatch: return "DateMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::DateNotInPanel: return "DateNotInPanel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::NonPsdCorrelation: return "NonPsdCorrelation";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::PanelTooShort: return "PanelTooShort";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateResample: return "DegenerateResample";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return ErrorCategory::Io;
    case ErrorCode::NotPositiveSemidefinite:
    case ErrorCode::NonPsdCorrelation:
    case ErrorCode::DegenerateDenominator:
    case ErrorCode::ZeroVariance:
    case ErrorCode::DegenerateResample:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Validation;
  }
}

Error::Error(ErrorCode code, const std::string& message, Location where)
    : std::runtime_error(decorate(message, where)), code_(code), where_(std::move(where)) {}

}  // namespace herd
