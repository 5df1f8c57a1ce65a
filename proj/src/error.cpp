#include "elyte/error.hpp"

namespace elyte {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::UnitMismatch: return "UnitMismatch";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::UnknownAgeBand: return "UnknownAgeBand";
    case ErrorCode::NegativeAmount: return "NegativeAmount";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::InvalidEntry: return "InvalidEntry";
    case ErrorCode::UnknownPatient: return "UnknownPatient";
    case ErrorCode::UnsupportedAnalyte: return "UnsupportedAnalyte";
    case ErrorCode::NoLabHistory: return "NoLabHistory";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::UntrainedAnalyte: return "UntrainedAnalyte";
    case ErrorCode::MissingRange: return "MissingRange";
    case ErrorCode::MissingLink: return "MissingLink";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::BadC: return "BadC";
    case ErrorCode::NoFeasibleItem: return "NoFeasibleItem";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroActual: return "ZeroActual";
    case ErrorCode::ConstantActuals: return "ConstantActuals";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Validation: return "Validation";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace elyte
