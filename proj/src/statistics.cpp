#include "popstat/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "popstat/error.hpp"

namespace popstat {

namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::BadConfidenceLevel, "confidence level must lie in (0, 1)");
  }
}

}  // namespace

double ln_death_rate(double deaths, double population) {
  if (!(population > 0.0) || !std::isfinite(population)) {
    throw Error(ErrorKind::NonpositivePopulation, "population must be positive");
  }
  if (!(deaths >= 0.0) || !std::isfinite(deaths)) {
    throw Error(ErrorKind::NegativeDeaths, "deaths must be a non-negative count");
  }
  if (deaths == 0.0) throw Error(ErrorKind::ZeroDeaths, "log rate undefined for zero deaths");
  return std::log(deaths / population * 1e6);
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch, "x has " + std::to_string(x.size()) +
                                               " values, y has " + std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::TooFewPoints, "correlation needs at least 3 points");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::DegenerateVariance,
                sxx == 0.0 ? "x has zero variance" : "y has zero variance");
  }
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double p_value(double r, std::size_t n) {
  if (n < 3) throw Error(ErrorKind::TooFewPoints, "p-value needs n >= 3");
  if (!(std::abs(r) <= 1.0)) throw Error(ErrorKind::DegenerateVariance, "|r| exceeds 1");
  if (std::abs(r) == 1.0) return 0.0;
  if (r == 0.0) return 1.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df) / std::sqrt(1.0 - r * r);
  const boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
}

std::pair<double, double> fisher_ci(double r, std::size_t n, double level) {
  check_level(level);
  if (n < 4) throw Error(ErrorKind::TooFewPoints, "Fisher interval needs n >= 4");
  if (!(std::abs(r) < 1.0)) {
    throw Error(ErrorKind::DegenerateVariance, "Fisher interval undefined for |r| = 1");
  }
  const double z = std::atanh(r);
  const double half = boost::math::quantile(boost::math::normal{}, (1.0 + level) / 2.0) /
                      std::sqrt(static_cast<double>(n - 3));
  return {std::tanh(z - half), std::tanh(z + half)};
}

CorrelationReport correlation_report(std::span<const double> x, std::span<const double> y,
                                     double level) {
  check_level(level);
  CorrelationReport report;
  report.r = pearson_r(x, y);
  report.n = x.size();
  report.r_squared = report.r * report.r;
  report.p_two_tailed = p_value(report.r, report.n);
  if (std::abs(report.r) == 1.0) {
    report.ci_low = report.ci_high = report.r;
    report.ci_degenerate = true;
  } else if (report.n < 4) {
    // No Fisher interval exists at n = 3; report the whole range.
    report.ci_low = -1.0;
    report.ci_high = 1.0;
    report.ci_degenerate = true;
  } else {
    std::tie(report.ci_low, report.ci_high) = fisher_ci(report.r, report.n, level);
  }
  return report;
}

CorrelationReport indicator_correlation(const IndicatorSeries& indicator,
                                        const LogRateSeries& rates, double level) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [country, value] : indicator.values) {
    const auto it = rates.values.find(country);
    if (it == rates.values.end()) continue;
    x.push_back(value);
    y.push_back(it->second);
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::InsufficientOverlap,
                "indicator '" + indicator.name + "' shares " + std::to_string(x.size()) +
                    " countries with cause '" + rates.cause.id + "', need at least 3");
  }
  return correlation_report(x, y, level);
}

}  // namespace popstat
