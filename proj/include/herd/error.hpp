#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace herd {

enum class ErrorCode {
  Io,
  InvalidConfig,
  MissingCell,
  NonPositivePrice,
  UnparseableValue,
  UnparseableDate,
  DuplicateDate,
  DateMismatch,
  LabelMismatch,
  DateNotInPanel,
  DimensionMismatch,
  InvalidWeights,
  InvalidParameter,
  NotPositiveSemidefinite,
  NonPsdCorrelation,
  InsufficientSamples,
  PanelTooShort,
  EmptySeries,
  DegenerateDenominator,
  ZeroVariance,
  DegenerateResample,
};

// Maps onto the CLI exit codes: 1, 2 and 3 respectively.
enum class ErrorCategory { Io = 1, Validation = 2, Numerical = 3 };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

struct Location {
  std::string file;
  std::optional<std::size_t> row{};  // 1-based line number in the file
  std::optional<std::string> column{};
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Location where = {});

  ErrorCode code() const noexcept { return code_; }
  const Location& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  Location where_;
};

}  // namespace herd
