#include "popstat/pyramid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "divergence_kernel.hpp"
#include "popstat/error.hpp"

namespace popstat {

namespace {

constexpr double kSumTolerance = 1e-9;
// Well above the rounding residue of dividing 42 counts by their sum.
constexpr double kIdempotenceTolerance = 1e-13;

// Bin-ordered left-to-right sum; every reduction in this module uses it.
double ordered_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string_view to_string(Sex sex) noexcept {
  return sex == Sex::male ? "male" : "female";
}

std::optional<Sex> parse_sex(std::string_view text) noexcept {
  if (text == "male") return Sex::male;
  if (text == "female") return Sex::female;
  return std::nullopt;
}

BinScheme::BinScheme(int age_groups) : age_groups_(age_groups) {
  if (age_groups < 1) {
    throw Error(ErrorKind::BadBinCount,
                "bin scheme needs at least one age group, got " + std::to_string(age_groups));
  }
}

std::string BinScheme::age_label(int age_group_index) const {
  if (age_group_index < 0 || age_group_index >= age_groups_) {
    throw Error(ErrorKind::BadAgeGroupLabel,
                "age group index " + std::to_string(age_group_index) + " out of range");
  }
  const int lo = 5 * age_group_index;
  if (age_group_index == age_groups_ - 1) return std::to_string(lo) + "+";
  return std::to_string(lo) + "-" + std::to_string(lo + 4);
}

std::optional<int> BinScheme::parse_age_label(std::string_view label) const {
  if (label.empty()) return std::nullopt;
  std::optional<int> lo;
  if (label.back() == '+') {
    lo = parse_int(label.substr(0, label.size() - 1));
    if (!lo || *lo != 5 * (age_groups_ - 1)) return std::nullopt;
    return age_groups_ - 1;
  }
  const auto dash = label.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  lo = parse_int(label.substr(0, dash));
  const auto hi = parse_int(label.substr(dash + 1));
  if (!lo || !hi || *lo % 5 != 0 || *hi != *lo + 4) return std::nullopt;
  const int index = *lo / 5;
  if (index < 0 || index >= age_groups_ - 1) return std::nullopt;
  return index;
}

std::size_t AgeSexBin::index(const BinScheme& scheme) const {
  if (age_group_index < 0 || age_group_index >= scheme.age_groups()) {
    throw Error(ErrorKind::BadAgeGroupLabel,
                "age group index " + std::to_string(age_group_index) + " out of range");
  }
  return static_cast<std::size_t>(sex == Sex::male ? 0 : scheme.age_groups()) +
         static_cast<std::size_t>(age_group_index);
}

std::vector<double> normalize_pyramid(std::span<const double> raw_counts) {
  for (std::size_t i = 0; i < raw_counts.size(); ++i) {
    if (!(raw_counts[i] >= 0.0) || !std::isfinite(raw_counts[i])) {
      throw Error(ErrorKind::NegativeCount, "bin " + std::to_string(i) +
                                                " has negative or non-finite count");
    }
  }
  const double total = ordered_sum(raw_counts);
  if (!(total > 0.0)) throw Error(ErrorKind::AllZero, "every count is zero");

  // Input that is already a distribution passes through untouched, which
  // makes normalisation idempotent: re-reading a written pyramid reproduces
  // it bit for bit.
  if (std::abs(total - 1.0) <= kIdempotenceTolerance) {
    return {raw_counts.begin(), raw_counts.end()};
  }
  std::vector<double> p(raw_counts.size());
  std::transform(raw_counts.begin(), raw_counts.end(), p.begin(),
                 [total](double c) { return c / total; });
  return p;
}

PopulationPyramid::PopulationPyramid(CountryId country, int year,
                                     std::vector<double> proportions, BinScheme scheme)
    : country_(std::move(country)), year_(year), scheme_(scheme),
      proportions_(std::move(proportions)) {
  if (proportions_.size() != scheme_.bin_count()) {
    throw Error(ErrorKind::BadBinCount,
                country_.iso3() + ": expected " + std::to_string(scheme_.bin_count()) +
                    " bins, got " + std::to_string(proportions_.size()));
  }
  for (double x : proportions_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::NegativeCount, country_.iso3() + ": negative proportion");
    }
  }
  if (std::abs(ordered_sum(proportions_) - 1.0) > kSumTolerance) {
    throw Error(ErrorKind::BadBinCount, country_.iso3() + ": proportions do not sum to 1");
  }
}

PopulationPyramid PopulationPyramid::from_counts(CountryId country, int year,
                                                 std::span<const double> raw_counts,
                                                 BinScheme scheme) {
  return PopulationPyramid(std::move(country), year, normalize_pyramid(raw_counts), scheme);
}

double PopulationPyramid::age_group_mass(int age_group_index) const {
  return (*this)[AgeSexBin{Sex::male, age_group_index}] +
         (*this)[AgeSexBin{Sex::female, age_group_index}];
}

namespace detail {

void check_smoothing(double smoothing) {
  if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
    throw Error(ErrorKind::BadSmoothing, "smoothing must be a positive finite number");
  }
}

double kl_of_smoothed(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != q[i]) sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

}  // namespace detail

std::vector<double> smooth_distribution(std::span<const double> p, double smoothing) {
  detail::check_smoothing(smoothing);
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(),
                 [smoothing](double x) { return std::max(x, smoothing); });
  const double total = ordered_sum(out);
  for (double& x : out) x /= total;
  return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double smoothing) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::BadBinCount, "distributions have different bin counts");
  }
  return detail::kl_of_smoothed(smooth_distribution(p, smoothing),
                                smooth_distribution(q, smoothing));
}

double pop_divergence(const PopulationPyramid& p, const PopulationPyramid& q,
                      double smoothing) {
  if (!(p.scheme() == q.scheme())) {
    throw Error(ErrorKind::BadBinCount, p.country().iso3() + " and " + q.country().iso3() +
                                            " use different bin schemes");
  }
  return kl_divergence(p.proportions(), q.proportions(), smoothing);
}

DivergenceVector divergence_vector(const CountryId& reference, const PyramidSet& pyramids,
                                   double smoothing) {
  const auto ref = pyramids.find(reference);
  if (ref == pyramids.end()) {
    throw Error(ErrorKind::UnknownReference,
                "reference " + reference.iso3() + " has no population pyramid");
  }
  const auto q = smooth_distribution(ref->second.proportions(), smoothing);

  DivergenceVector out{ref->first, {}};
  for (const auto& [country, pyramid] : pyramids) {
    if (!(pyramid.scheme() == ref->second.scheme())) {
      throw Error(ErrorKind::BadBinCount, country.iso3() + " uses a different bin scheme");
    }
    const double d =
        country == reference
            ? 0.0
            : detail::kl_of_smoothed(smooth_distribution(pyramid.proportions(), smoothing), q);
    out.values.emplace(country, d);
  }
  return out;
}

std::vector<CountryId> closest_countries(const CountryId& reference, const PyramidSet& pyramids,
                                         std::size_t k, double smoothing) {
  const auto dv = divergence_vector(reference, pyramids, smoothing);
  std::vector<std::pair<double, CountryId>> ranked;
  ranked.reserve(dv.values.size());
  for (const auto& [country, d] : dv.values) {
    if (country != reference) ranked.emplace_back(d, country);
  }
  if (k > ranked.size()) {
    throw Error(ErrorKind::KTooLarge, "asked for " + std::to_string(k) +
                                          " closest countries but only " +
                                          std::to_string(ranked.size()) + " are available");
  }
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k),
                    ranked.end());
  std::vector<CountryId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].second);
  return out;
}

}  // namespace popstat
