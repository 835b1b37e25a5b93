#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "popstat/cause.hpp"
#include "popstat/country.hpp"

namespace popstat {

/// Natural log of deaths per million for one cause.
struct LogRateSeries {
  CauseId cause;
  std::map<CountryId, double> values;
  /// Countries removed because their death count was zero.
  std::size_t dropped = 0;
};

/// A named per-country indicator (life expectancy, HDI, ...).
struct IndicatorSeries {
  std::string name;
  std::map<CountryId, double> values;
};

struct CorrelationReport {
  double r = 0.0;
  std::size_t n = 0;
  double p_two_tailed = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double r_squared = 0.0;
  /// Set when |r| == 1 and the interval collapses to [r, r].
  bool ci_degenerate = false;
};

inline constexpr double kDefaultConfidence = 0.95;

/// ln(deaths / population * 1e6). Throws Error(ZeroDeaths) when deaths is
/// zero and Error(NonpositivePopulation) when population <= 0.
[[nodiscard]] double ln_death_rate(double deaths, double population);

/// Standard Pearson product-moment correlation.
[[nodiscard]] double pearson_r(std::span<const double> x, std::span<const double> y);

/// Two-tailed p-value of r under Student-t with n-2 degrees of freedom.
[[nodiscard]] double p_value(double r, std::size_t n);

/// Fisher-z confidence interval for r.
[[nodiscard]] std::pair<double, double> fisher_ci(double r, std::size_t n,
                                                  double level = kDefaultConfidence);

[[nodiscard]] CorrelationReport correlation_report(std::span<const double> x,
                                                   std::span<const double> y,
                                                   double level = kDefaultConfidence);

/// Correlates an indicator with log rates over the countries both cover,
/// joined in ascending iso3 order. Throws Error(InsufficientOverlap) below
/// three shared countries.
[[nodiscard]] CorrelationReport indicator_correlation(const IndicatorSeries& indicator,
                                                      const LogRateSeries& rates,
                                                      double level = kDefaultConfidence);

}  // namespace popstat
