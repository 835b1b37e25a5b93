#pragma once

// Straightforward reference computations used to cross-check the library.
// Nothing here calls into the code under test except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "popstat/pyramid.hpp"
#include "popstat/statistics.hpp"

namespace oracle {

inline std::vector<long double> floor_and_renormalize(const std::vector<double>& p, double s) {
  std::vector<long double> out;
  long double total = 0;
  for (double x : p) {
    out.push_back(x < s ? s : x);
    total += out.back();
  }
  for (auto& x : out) x /= total;
  return out;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& q, double s) {
  const auto ps = floor_and_renormalize(p, s);
  const auto qs = floor_and_renormalize(q, s);
  long double sum = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) sum += ps[i] * std::log(ps[i] / qs[i]);
  return static_cast<double>(sum);
}

inline std::vector<double> to_vector(const popstat::PopulationPyramid& p) {
  return {p.proportions().begin(), p.proportions().end()};
}

/// Textbook sums-of-products form, in long double.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double cov = sxy - sx * sy / n;
  const long double vx = sxx - sx * sx / n;
  const long double vy = syy - sy * sy / n;
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

struct Enumerated {
  std::string reference;
  double r = 0.0;
  std::map<std::string, double> r_by_candidate;
};

/// Exhaustive reference search on plain vectors keyed by iso3.
inline Enumerated enumerate_references(const std::map<std::string, std::vector<double>>& pyramids,
                                       const std::map<std::string, double>& ln_rates,
                                       double smoothing) {
  std::vector<std::string> sample;
  for (const auto& [iso, _] : pyramids) {
    if (ln_rates.count(iso)) sample.push_back(iso);
  }
  std::vector<double> y;
  for (const auto& iso : sample) y.push_back(ln_rates.at(iso));

  Enumerated best;
  double best_abs = -1.0;
  for (const auto& cand : sample) {
    std::vector<double> x;
    for (const auto& iso : sample) {
      x.push_back(iso == cand ? 0.0 : kl(pyramids.at(iso), pyramids.at(cand), smoothing));
    }
    const double r = pearson(x, y);
    if (!std::isfinite(r)) continue;
    best.r_by_candidate[cand] = r;
    if (std::abs(r) > best_abs) {  // sample is iso3-sorted: first wins ties
      best_abs = std::abs(r);
      best.reference = cand;
      best.r = r;
    }
  }
  return best;
}

/// Dirichlet-style random distribution over `bins`; `zero_prob` of the bins
/// are forced to zero (at least one stays positive).
inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t bins,
                                               double zero_prob = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution zero(zero_prob);
  std::vector<double> v(bins);
  double total = 0.0;
  for (auto& x : v) {
    x = zero(rng) ? 0.0 : e(rng);
    total += x;
  }
  if (total == 0.0) {
    v[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : v) x /= total;
  return v;
}

}  // namespace oracle
