#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "popstat/error.hpp"
#include "popstat/mortality.hpp"
#include "popstat/pyramid.hpp"
#include "popstat/statistics.hpp"

namespace popstat {

struct TuningOptions {
  double smoothing = kDefaultSmoothing;
  double confidence_level = kDefaultConfidence;
  /// Restricts the reference search; defaults to every eligible country.
  std::optional<std::vector<CountryId>> candidates;
  std::size_t closest_k = 3;
  /// Table year to use when a cause has several; latest year otherwise.
  std::optional<int> year;
};

struct CandidateScore {
  CountryId candidate;
  /// Empty when the candidate's divergence vector has zero variance.
  std::optional<CorrelationReport> report;
};

struct TuneResult {
  CountryId reference;
  CorrelationReport report;
  /// Every evaluated candidate, ascending iso3.
  std::vector<CandidateScore> scores;
};

/// Brute-force reference search: returns the candidate whose divergence
/// vector correlates most strongly (largest |r|) with the log rates. Ties go
/// to the smaller iso3.
[[nodiscard]] TuneResult tune_reference(const PyramidSet& pyramids,
                                        const LogRateSeries& rates,
                                        const TuningOptions& options = {});

struct ScatterPoint {
  CountryId country;
  double popdivergence = 0.0;
  double ln_rate = 0.0;
};

struct PoPStatResult {
  CauseId cause;
  CountryId reference;
  CorrelationReport report;
  std::vector<CountryId> closest;
  std::size_t dropped_countries = 0;
  /// Sample behind `report`, ascending iso3.
  std::vector<ScatterPoint> scatter;
};

[[nodiscard]] PoPStatResult popstat(const CauseId& cause, const PyramidSet& pyramids,
                                    const std::vector<MortalityTable>& mortality,
                                    const TuningOptions& options = {});

struct CauseFailure {
  ErrorKind kind;
  std::string message;
};

struct BatchEntry {
  CauseId cause;
  std::variant<PoPStatResult, CauseFailure> outcome;

  [[nodiscard]] bool ok() const noexcept {
    return std::holds_alternative<PoPStatResult>(outcome);
  }
};

/// Runs popstat per cause; a failing cause becomes a CauseFailure and does
/// not stop the batch. Output order follows `causes`.
[[nodiscard]] std::vector<BatchEntry> popstat_batch(const std::vector<CauseId>& causes,
                                                    const PyramidSet& pyramids,
                                                    const std::vector<MortalityTable>& mortality,
                                                    const TuningOptions& options = {});

}  // namespace popstat
