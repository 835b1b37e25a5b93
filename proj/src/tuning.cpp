#include "popstat/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "divergence_kernel.hpp"
#include "popstat/error.hpp"

namespace popstat {

namespace {

// Countries with both a pyramid and a log rate, ascending iso3.
struct Sample {
  std::vector<CountryId> countries;
  std::vector<std::vector<double>> smoothed;
  std::vector<double> ln_rates;
};

Sample build_sample(const PyramidSet& pyramids, const LogRateSeries& rates, double smoothing) {
  Sample s;
  for (const auto& [country, pyramid] : pyramids) {
    const auto it = rates.values.find(country);
    if (it == rates.values.end()) continue;
    s.countries.push_back(country);
    s.smoothed.push_back(smooth_distribution(pyramid.proportions(), smoothing));
    s.ln_rates.push_back(it->second);
  }
  return s;
}

std::vector<double> divergences_from(const Sample& s, std::size_t ref) {
  std::vector<double> x(s.countries.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = i == ref ? 0.0 : detail::kl_of_smoothed(s.smoothed[i], s.smoothed[ref]);
  }
  return x;
}

const MortalityTable& select_table(const CauseId& cause,
                                   const std::vector<MortalityTable>& mortality,
                                   std::optional<int> year) {
  const MortalityTable* chosen = nullptr;
  for (const auto& table : mortality) {
    if (table.cause.id != cause.id) continue;
    if (year && table.year != *year) continue;
    if (chosen == nullptr || table.year > chosen->year) chosen = &table;
  }
  if (chosen == nullptr) {
    throw Error(ErrorKind::UnknownCause,
                "no mortality table for cause '" + cause.id + "'" +
                    (year ? " in year " + std::to_string(*year) : std::string{}));
  }
  return *chosen;
}

}  // namespace

TuneResult tune_reference(const PyramidSet& pyramids, const LogRateSeries& rates,
                          const TuningOptions& options) {
  detail::check_smoothing(options.smoothing);
  const Sample sample = build_sample(pyramids, rates, options.smoothing);
  if (sample.countries.size() < 3) {
    throw Error(ErrorKind::InsufficientOverlap,
                "cause '" + rates.cause.id + "' has " + std::to_string(sample.countries.size()) +
                    " countries with both a pyramid and a rate, need at least 3");
  }

  std::vector<std::size_t> candidates;
  if (options.candidates) {
    for (const auto& c : *options.candidates) {
      const auto it = std::lower_bound(sample.countries.begin(), sample.countries.end(), c);
      if (it == sample.countries.end() || *it != c) {
        throw Error(ErrorKind::UnknownReference,
                    "candidate " + c.iso3() + " lacks a pyramid or a rate for cause '" +
                        rates.cause.id + "'");
      }
      candidates.push_back(static_cast<std::size_t>(it - sample.countries.begin()));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  } else {
    for (std::size_t i = 0; i < sample.countries.size(); ++i) candidates.push_back(i);
  }

  TuneResult result;
  result.scores.reserve(candidates.size());
  const CorrelationReport* best = nullptr;
  std::size_t best_index = 0;
  for (std::size_t c : candidates) {
    CandidateScore score{sample.countries[c], std::nullopt};
    try {
      score.report =
          correlation_report(divergences_from(sample, c), sample.ln_rates, options.confidence_level);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateVariance) throw;
    }
    result.scores.push_back(std::move(score));
  }
  // Candidates are in ascending iso3, so a strict comparison keeps the
  // smallest code among equal |r|.
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    const auto& report = result.scores[i].report;
    if (!report) continue;
    if (best == nullptr || std::abs(report->r) > std::abs(best->r)) {
      best = &*report;
      best_index = i;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorKind::AllDegenerate,
                "every reference candidate has zero variance for cause '" + rates.cause.id + "'");
  }
  result.reference = result.scores[best_index].candidate;
  result.report = *best;
  return result;
}

PoPStatResult popstat(const CauseId& cause, const PyramidSet& pyramids,
                      const std::vector<MortalityTable>& mortality, const TuningOptions& options) {
  const MortalityTable& table = select_table(cause, mortality, options.year);

  MortalityTable available{table.cause, table.year, {}};
  for (const auto& [country, entry] : table.entries) {
    if (pyramids.contains(country)) available.entries.emplace(country, entry);
  }
  const LogRateSeries rates = log_rates(available);
  if (rates.values.size() < 3) {
    throw Error(ErrorKind::InsufficientOverlap,
                "cause '" + table.cause.id + "' has " + std::to_string(rates.values.size()) +
                    " usable countries, need at least 3");
  }

  PyramidSet sample;
  for (const auto& [country, _] : rates.values) sample.emplace(country, pyramids.at(country));

  TuneResult tuned = tune_reference(sample, rates, options);

  PoPStatResult out;
  out.cause = table.cause;
  out.reference = tuned.reference;
  out.report = tuned.report;
  out.dropped_countries = rates.dropped;
  const std::size_t k = std::min(options.closest_k, sample.size() - 1);
  out.closest = closest_countries(tuned.reference, sample, k, options.smoothing);

  const auto dv = divergence_vector(tuned.reference, sample, options.smoothing);
  out.scatter.reserve(sample.size());
  for (const auto& [country, d] : dv.values) {
    out.scatter.push_back({country, d, rates.values.at(country)});
  }
  return out;
}

std::vector<BatchEntry> popstat_batch(const std::vector<CauseId>& causes,
                                      const PyramidSet& pyramids,
                                      const std::vector<MortalityTable>& mortality,
                                      const TuningOptions& options) {
  std::vector<BatchEntry> out;
  out.reserve(causes.size());
  for (const auto& cause : causes) {
    try {
      out.push_back({cause, popstat(cause, pyramids, mortality, options)});
    } catch (const Error& e) {
      out.push_back({cause, CauseFailure{e.kind(), e.what()}});
    }
  }
  return out;
}

}  // namespace popstat
