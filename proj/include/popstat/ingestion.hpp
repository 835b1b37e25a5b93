#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "popstat/cause.hpp"
#include "popstat/error.hpp"
#include "popstat/mortality.hpp"
#include "popstat/pyramid.hpp"
#include "popstat/statistics.hpp"

namespace popstat {

inline constexpr int kDefaultYear = 2021;

/// Explicit free-text name (or legacy code) to ISO3 mapping. No fuzzy
/// matching is ever applied.
class CountryAliasMap {
 public:
  /// Throws Error(BadCountryCode) if `iso3` is malformed.
  void add(const std::string& name, const std::string& iso3);
  [[nodiscard]] std::optional<std::string> lookup(const std::string& name) const;
  [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

/// A rejected input row. `line` is 1-based and counts the header.
struct RowError {
  std::size_t line = 0;
  ErrorKind kind = ErrorKind::BadNumber;
  std::string message;
};

/// Row accounting. Every parsed row is either accepted or rejected;
/// skipped rows belong to a different year or level than requested.
struct ParseStats {
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  std::size_t rows_parsed = 0;
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
};

struct PopulationData {
  PyramidSet pyramids;
  std::vector<RowError> errors;
  ParseStats stats;
};

struct MortalityData {
  std::vector<MortalityTable> tables;
  CauseHierarchy hierarchy;
  std::vector<RowError> errors;
  std::vector<std::string> hierarchy_errors;
  ParseStats stats;
};

struct IndicatorData {
  IndicatorSeries series;
  std::vector<RowError> errors;
  ParseStats stats;
};

// File-level problems (unreadable file, missing column) throw Error; row
// level problems are collected in `errors`.

/// Header `iso3,name,year,sex,age_group,count`.
[[nodiscard]] PopulationData read_population(std::istream& in, int year,
                                             const BinScheme& scheme = BinScheme{},
                                             const CountryAliasMap* aliases = nullptr);
[[nodiscard]] PopulationData parse_population_file(const std::filesystem::path& path,
                                                   int year = kDefaultYear,
                                                   const BinScheme& scheme = BinScheme{},
                                                   const CountryAliasMap* aliases = nullptr);

/// Header `cause_id,cause_name,level,parent_id,iso3,year,deaths,population`;
/// `population` may be replaced by `rate_per_million`.
[[nodiscard]] MortalityData read_mortality(std::istream& in,
                                           std::optional<int> level_filter = std::nullopt,
                                           const CountryAliasMap* aliases = nullptr);
[[nodiscard]] MortalityData parse_mortality_file(const std::filesystem::path& path,
                                                 std::optional<int> level_filter = std::nullopt,
                                                 const CountryAliasMap* aliases = nullptr);

/// Header `iso3,value`.
[[nodiscard]] IndicatorData read_indicator(std::istream& in, const std::string& name,
                                           const CountryAliasMap* aliases = nullptr);
[[nodiscard]] IndicatorData parse_indicator_file(const std::filesystem::path& path,
                                                 const std::string& name,
                                                 const CountryAliasMap* aliases = nullptr);

/// Header `name,iso3`.
[[nodiscard]] CountryAliasMap read_aliases(std::istream& in);
[[nodiscard]] CountryAliasMap parse_alias_file(const std::filesystem::path& path);

/// Writes pyramids in the population schema with proportions as counts,
/// printed at round-trip precision.
void write_population(std::ostream& out, const PyramidSet& pyramids);
/// Writes tables in the mortality schema (deaths + population form).
void write_mortality(std::ostream& out, const std::vector<MortalityTable>& tables);

struct JoinReport {
  std::vector<CountryId> only_in_pyramids;
  std::vector<CountryId> only_in_mortality;

  [[nodiscard]] bool empty() const noexcept {
    return only_in_pyramids.empty() && only_in_mortality.empty();
  }
};

struct JoinedDataset {
  PyramidSet pyramids;
  std::vector<MortalityTable> tables;
  JoinReport report;
};

[[nodiscard]] std::set<CountryId> inner_join_keys(const std::set<CountryId>& a,
                                                  const std::set<CountryId>& b);

/// Resolves both sides through `aliases` (by iso3 and by canonical name),
/// then keeps only countries present in the pyramids and in at least one
/// table.
[[nodiscard]] JoinedDataset join_countries(const PyramidSet& pyramids,
                                           const std::vector<MortalityTable>& tables,
                                           const CountryAliasMap& aliases = {});

}  // namespace popstat
