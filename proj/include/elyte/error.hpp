#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elyte {

enum class ErrorCode {
  // catalog
  MissingColumn,
  EmptyCatalog,
  UnitMismatch,
  UnknownItem,
  // patient
  UnknownAgeBand,
  NegativeAmount,
  DuplicateDate,
  InvalidEntry,
  UnknownPatient,
  // features
  UnsupportedAnalyte,
  NoLabHistory,
  InsufficientHistory,
  // forecaster
  EmptyDataset,
  DimensionMismatch,
  InsufficientData,
  UntrainedAnalyte,
  // optimizer
  MissingRange,
  MissingLink,
  InvalidRho,
  // recommender
  BadC,
  NoFeasibleItem,
  // evaluation
  LengthMismatch,
  ZeroActual,
  ConstantActuals,
  InvalidConfig,
  // plumbing
  Io,
  Parse,
  Validation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure is reported through this type; `code()` is stable and
/// is what the CLI and HTTP layers map to exit codes and status codes.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace elyte
