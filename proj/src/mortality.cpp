#include "popstat/mortality.hpp"

#include <cmath>

#include "popstat/error.hpp"

namespace popstat {

double MortalityEntry::deaths_per_million() const {
  if (rate_per_million) return *rate_per_million;
  if (!population || !(*population > 0.0)) {
    throw Error(ErrorKind::NonpositivePopulation, "entry has no positive population");
  }
  return deaths / *population * 1e6;
}

LogRateSeries log_rates(const MortalityTable& table) {
  LogRateSeries out{table.cause, {}, 0};
  for (const auto& [country, entry] : table.entries) {
    if (entry.rate_per_million) {
      if (*entry.rate_per_million == 0.0) {
        ++out.dropped;
        continue;
      }
      out.values.emplace(country, std::log(*entry.rate_per_million));
      continue;
    }
    try {
      out.values.emplace(country, ln_death_rate(entry.deaths, entry.population.value_or(0.0)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroDeaths) throw;
      ++out.dropped;
    }
  }
  return out;
}

}  // namespace popstat
