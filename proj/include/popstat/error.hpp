#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace popstat {

enum class ErrorKind {
  // pyramid_core
  AllZero,
  NegativeCount,
  BadBinCount,
  BadSmoothing,
  UnknownReference,
  KTooLarge,
  BadCountryCode,
  // statistics
  ZeroDeaths,
  NonpositivePopulation,
  LengthMismatch,
  DegenerateVariance,
  TooFewPoints,
  BadConfidenceLevel,
  InsufficientOverlap,
  // tuning
  AllDegenerate,
  UnknownCause,
  // ingestion
  FileNotFound,
  MissingColumn,
  BadAgeGroupLabel,
  BadSexLabel,
  BadNumber,
  UnknownLevel,
  NegativeDeaths,
  DuplicateEntry,
  IncompletePyramid,
  BadHierarchy,
  // synthetic
  BadFactor,
  BadSexRatio,
  InsufficientCountries,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace popstat
