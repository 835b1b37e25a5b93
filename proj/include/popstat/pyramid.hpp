#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popstat/country.hpp"

namespace popstat {

enum class Sex { male = 0, female = 1 };

std::string_view to_string(Sex sex) noexcept;
std::optional<Sex> parse_sex(std::string_view text) noexcept;

/// Five-year age strata with an open-ended top group. The default of 21
/// groups gives 0-4, 5-9, ..., 95-99, 100+.
class BinScheme {
 public:
  static constexpr int kDefaultAgeGroups = 21;

  BinScheme() = default;
  explicit BinScheme(int age_groups);

  [[nodiscard]] int age_groups() const noexcept { return age_groups_; }
  [[nodiscard]] std::size_t bin_count() const noexcept {
    return static_cast<std::size_t>(age_groups_) * 2;
  }
  [[nodiscard]] std::string age_label(int age_group_index) const;
  [[nodiscard]] std::optional<int> parse_age_label(std::string_view label) const;

  friend bool operator==(const BinScheme&, const BinScheme&) = default;

 private:
  int age_groups_ = kDefaultAgeGroups;
};

/// One cell of a pyramid. Bins are laid out sex-major: all male age groups
/// first, then all female age groups.
struct AgeSexBin {
  Sex sex = Sex::male;
  int age_group_index = 0;

  [[nodiscard]] std::size_t index(const BinScheme& scheme) const;
};

/// Normalises non-negative counts to proportions summing to one.
/// Throws Error(NegativeCount) or Error(AllZero).
[[nodiscard]] std::vector<double> normalize_pyramid(std::span<const double> raw_counts);

class PopulationPyramid {
 public:
  /// `proportions` must be non-negative, sum to 1 within 1e-9 and have
  /// scheme.bin_count() entries.
  PopulationPyramid(CountryId country, int year, std::vector<double> proportions,
                    BinScheme scheme = BinScheme{});

  static PopulationPyramid from_counts(CountryId country, int year,
                                       std::span<const double> raw_counts,
                                       BinScheme scheme = BinScheme{});

  [[nodiscard]] const CountryId& country() const noexcept { return country_; }
  [[nodiscard]] int year() const noexcept { return year_; }
  [[nodiscard]] const BinScheme& scheme() const noexcept { return scheme_; }
  [[nodiscard]] std::span<const double> proportions() const noexcept {
    return proportions_;
  }
  [[nodiscard]] double operator[](const AgeSexBin& bin) const {
    return proportions_.at(bin.index(scheme_));
  }
  /// Mass of one age group, both sexes.
  [[nodiscard]] double age_group_mass(int age_group_index) const;

 private:
  CountryId country_;
  int year_;
  BinScheme scheme_;
  std::vector<double> proportions_;
};

using PyramidSet = std::map<CountryId, PopulationPyramid>;

inline constexpr double kDefaultSmoothing = 1e-9;

/// Floors every bin at `smoothing` and renormalises.
[[nodiscard]] std::vector<double> smooth_distribution(std::span<const double> p,
                                                      double smoothing);

/// KL divergence of `p` from the reference `q`, in nats, after both are
/// floored at `smoothing` and renormalised. Summation runs in ascending bin
/// order.
[[nodiscard]] double pop_divergence(const PopulationPyramid& p,
                                    const PopulationPyramid& q,
                                    double smoothing = kDefaultSmoothing);

/// Raw-vector form of pop_divergence.
[[nodiscard]] double kl_divergence(std::span<const double> p, std::span<const double> q,
                                   double smoothing = kDefaultSmoothing);

struct DivergenceVector {
  CountryId reference;
  std::map<CountryId, double> values;
};

/// Divergence of every pyramid from `reference`. Throws
/// Error(UnknownReference) if the reference has no pyramid.
[[nodiscard]] DivergenceVector divergence_vector(const CountryId& reference,
                                                 const PyramidSet& pyramids,
                                                 double smoothing = kDefaultSmoothing);

/// The `k` countries nearest the reference, ascending by divergence then
/// iso3, reference excluded. Throws Error(KTooLarge).
[[nodiscard]] std::vector<CountryId> closest_countries(const CountryId& reference,
                                                       const PyramidSet& pyramids,
                                                       std::size_t k,
                                                       double smoothing = kDefaultSmoothing);

}  // namespace popstat
