#include "popstat/error.hpp"

namespace popstat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::NegativeCount: return "NegativeCount";
    case ErrorKind::BadBinCount: return "BadBinCount";
    case ErrorKind::BadSmoothing: return "BadSmoothing";
    case ErrorKind::UnknownReference: return "UnknownReference";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::BadCountryCode: return "BadCountryCode";
    case ErrorKind::ZeroDeaths: return "ZeroDeaths";
    case ErrorKind::NonpositivePopulation: return "NonpositivePopulation";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::BadConfidenceLevel: return "BadConfidenceLevel";
    case ErrorKind::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::AllDegenerate: return "AllDegenerate";
    case ErrorKind::UnknownCause: return "UnknownCause";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::BadAgeGroupLabel: return "BadAgeGroupLabel";
    case ErrorKind::BadSexLabel: return "BadSexLabel";
    case ErrorKind::BadNumber: return "BadNumber";
    case ErrorKind::UnknownLevel: return "UnknownLevel";
    case ErrorKind::NegativeDeaths: return "NegativeDeaths";
    case ErrorKind::DuplicateEntry: return "DuplicateEntry";
    case ErrorKind::IncompletePyramid: return "IncompletePyramid";
    case ErrorKind::BadHierarchy: return "BadHierarchy";
    case ErrorKind::BadFactor: return "BadFactor";
    case ErrorKind::BadSexRatio: return "BadSexRatio";
    case ErrorKind::InsufficientCountries: return "InsufficientCountries";
  }
  return "Unknown";
}

}  // namespace popstat
