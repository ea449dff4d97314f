#include "gda/error.hpp"

namespace gda {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadSchema: return "BadSchema";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownQuestion: return "UnknownQuestion";
    case ErrorCode::BadAxis: return "BadAxis";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::QTooSmall: return "QTooSmall";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UnknownModality: return "UnknownModality";
    case ErrorCode::DuplicateIndividualId: return "DuplicateIndividualId";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::SupplementaryPoint: return "SupplementaryPoint";
    case ErrorCode::SubcloudTooLarge: return "SubcloudTooLarge";
    case ErrorCode::AllColumnsDemoted: return "AllColumnsDemoted";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::EmptyActiveBlock: return "EmptyActiveBlock";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorCode::OriginPoint: return "OriginPoint";
    case ErrorCode::ZeroProfile: return "ZeroProfile";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadSchema:
    case ErrorCode::BadConfig:
    case ErrorCode::MissingColumn:
    case ErrorCode::UnknownQuestion:
    case ErrorCode::BadAxis:
    case ErrorCode::BadK:
    case ErrorCode::QTooSmall:
      return ErrorCategory::Config;
    case ErrorCode::Io:
    case ErrorCode::UnknownModality:
    case ErrorCode::DuplicateIndividualId:
    case ErrorCode::EmptyTable:
    case ErrorCode::NegativeEntry:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptySet:
    case ErrorCode::SupplementaryPoint:
    case ErrorCode::SubcloudTooLarge:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Numeric;
  }
}

}  // namespace gda
