#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gda {

/// Broad failure class; the CLI maps each one to a process exit code.
enum class ErrorCategory { Config, Data, Numeric };

enum class ErrorCode {
  // configuration / schema
  BadSchema,
  BadConfig,
  MissingColumn,
  UnknownQuestion,
  BadAxis,
  BadK,
  QTooSmall,
  // data
  Io,
  UnknownModality,
  DuplicateIndividualId,
  EmptyTable,
  NegativeEntry,
  DimensionMismatch,
  EmptySet,
  SupplementaryPoint,
  SubcloudTooLarge,
  // numeric degeneracy
  AllColumnsDemoted,
  DegenerateTable,
  EmptyActiveBlock,
  ConstantColumn,
  ZeroEigenvalue,
  OriginPoint,
  ZeroProfile,
  SingularCovariance,
  DegenerateInput,
};

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace gda
