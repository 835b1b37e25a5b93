#pragma once

#include <map>
#include <optional>

#include "popstat/cause.hpp"
#include "popstat/country.hpp"
#include "popstat/statistics.hpp"

namespace popstat {

/// Either a death count plus population or a precomputed rate.
struct MortalityEntry {
  double deaths = 0.0;
  std::optional<double> population;
  std::optional<double> rate_per_million;

  [[nodiscard]] double deaths_per_million() const;
};

struct MortalityTable {
  CauseId cause;
  int year = 0;
  std::map<CountryId, MortalityEntry> entries;
};

/// Log-transforms a table. Zero-death countries are dropped and counted.
[[nodiscard]] LogRateSeries log_rates(const MortalityTable& table);

}  // namespace popstat
