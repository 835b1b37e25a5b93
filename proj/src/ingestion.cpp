#include "popstat/ingestion.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "csv.hpp"

namespace popstat {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open '" + path.string() + "'");
  return in;
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Alias file entries win over the raw cell; a well-formed code passes through.
std::optional<CountryId> resolve_country(const std::string& code, const std::string& name,
                                         const CountryAliasMap* aliases) {
  if (aliases != nullptr) {
    if (auto hit = aliases->lookup(code)) return CountryId(*hit, name);
    if (!name.empty()) {
      if (auto hit = aliases->lookup(name)) return CountryId(*hit, name);
    }
  }
  if (is_valid_iso3(code)) return CountryId(code, name);
  return std::nullopt;
}

class RowLog {
 public:
  RowLog(std::vector<RowError>& errors, ParseStats& stats) : errors_(errors), stats_(stats) {}

  void reject(std::size_t line, ErrorKind kind, const std::string& message) {
    errors_.push_back({line, kind, line_prefix(line) + message});
    ++stats_.rows_rejected;
  }
  void accept() { ++stats_.rows_accepted; }
  void unaccept(std::size_t line, ErrorKind kind, const std::string& message) {
    --stats_.rows_accepted;
    reject(line, kind, message);
  }

 private:
  std::vector<RowError>& errors_;
  ParseStats& stats_;
};

const std::string& field(const std::vector<std::string>& fields, std::size_t index) {
  static const std::string empty;
  return index < fields.size() ? fields[index] : empty;
}

struct PendingPyramid {
  CountryId country;
  std::vector<double> counts;
  std::vector<bool> present;
  std::vector<std::size_t> lines;
};

}  // namespace

void CountryAliasMap::add(const std::string& name, const std::string& iso3) {
  if (!is_valid_iso3(iso3)) {
    throw Error(ErrorKind::BadCountryCode,
                "alias '" + name + "' targets malformed iso3 '" + iso3 + "'");
  }
  entries_[name] = iso3;
}

std::optional<std::string> CountryAliasMap::lookup(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

PopulationData read_population(std::istream& in, int year, const BinScheme& scheme,
                               const CountryAliasMap* aliases) {
  csv::Reader reader(in);
  const auto c_iso3 = reader.require("iso3", "population file");
  const auto c_name = reader.require("name", "population file");
  const auto c_year = reader.require("year", "population file");
  const auto c_sex = reader.require("sex", "population file");
  const auto c_age = reader.require("age_group", "population file");
  const auto c_count = reader.require("count", "population file");

  PopulationData out;
  RowLog log(out.errors, out.stats);
  std::map<CountryId, PendingPyramid> pending;
  std::vector<std::string> f;
  while (reader.next(f)) {
    ++out.stats.rows_read;
    const std::size_t line = reader.line_number();
    const auto row_year = csv::parse_int(field(f, c_year));
    if (row_year && *row_year != year) {
      ++out.stats.rows_skipped;
      continue;
    }
    ++out.stats.rows_parsed;
    if (!row_year) {
      log.reject(line, ErrorKind::BadNumber, "bad year '" + field(f, c_year) + "'");
      continue;
    }
    const auto country = resolve_country(field(f, c_iso3), field(f, c_name), aliases);
    if (!country) {
      log.reject(line, ErrorKind::BadCountryCode,
                 "unknown country code '" + field(f, c_iso3) + "'");
      continue;
    }
    const auto sex = parse_sex(field(f, c_sex));
    if (!sex) {
      log.reject(line, ErrorKind::BadSexLabel, "bad sex label '" + field(f, c_sex) + "'");
      continue;
    }
    const auto age = scheme.parse_age_label(field(f, c_age));
    if (!age) {
      log.reject(line, ErrorKind::BadAgeGroupLabel,
                 "bad age group label '" + field(f, c_age) + "'");
      continue;
    }
    const auto count = csv::parse_double(field(f, c_count));
    if (!count) {
      log.reject(line, ErrorKind::BadNumber, "bad count '" + field(f, c_count) + "'");
      continue;
    }
    if (*count < 0.0) {
      log.reject(line, ErrorKind::NegativeCount, "negative count " + field(f, c_count));
      continue;
    }
    auto [it, _] = pending.try_emplace(*country, PendingPyramid{
                                                     *country,
                                                     std::vector<double>(scheme.bin_count(), 0.0),
                                                     std::vector<bool>(scheme.bin_count(), false),
                                                     {}});
    const std::size_t bin = AgeSexBin{*sex, *age}.index(scheme);
    if (it->second.present[bin]) {
      log.reject(line, ErrorKind::DuplicateEntry,
                 "duplicate " + std::string(to_string(*sex)) + " " + field(f, c_age) +
                     " row for " + country->iso3());
      continue;
    }
    it->second.counts[bin] = *count;
    it->second.present[bin] = true;
    it->second.lines.push_back(line);
    log.accept();
  }

  for (auto& [country, p] : pending) {
    const auto missing = std::count(p.present.begin(), p.present.end(), false);
    if (missing > 0) {
      for (std::size_t line : p.lines) {
        log.unaccept(line, ErrorKind::IncompletePyramid,
                     country.iso3() + " is missing " + std::to_string(missing) + " of " +
                         std::to_string(scheme.bin_count()) + " age-sex rows");
      }
      continue;
    }
    try {
      out.pyramids.emplace(country, PopulationPyramid::from_counts(country, year, p.counts, scheme));
    } catch (const Error& e) {
      for (std::size_t line : p.lines) {
        log.unaccept(line, e.kind(), country.iso3() + ": " + e.what());
      }
    }
  }
  return out;
}

PopulationData parse_population_file(const std::filesystem::path& path, int year,
                                     const BinScheme& scheme, const CountryAliasMap* aliases) {
  auto in = open_input(path);
  return read_population(in, year, scheme, aliases);
}

MortalityData read_mortality(std::istream& in, std::optional<int> level_filter,
                             const CountryAliasMap* aliases) {
  csv::Reader reader(in);
  const auto c_cause = reader.require("cause_id", "mortality file");
  const auto c_cause_name = reader.require("cause_name", "mortality file");
  const auto c_level = reader.require("level", "mortality file");
  const auto c_parent = reader.require("parent_id", "mortality file");
  const auto c_iso3 = reader.require("iso3", "mortality file");
  const auto c_year = reader.require("year", "mortality file");
  const auto c_deaths = reader.require("deaths", "mortality file");
  const auto c_rate = reader.column("rate_per_million");
  const auto c_pop = c_rate ? reader.column("population")
                            : std::optional(reader.require("population", "mortality file"));
  if (level_filter && (*level_filter < 1 || *level_filter > 3)) {
    throw Error(ErrorKind::UnknownLevel,
                "level filter " + std::to_string(*level_filter) + " outside 1-3");
  }

  MortalityData out;
  RowLog log(out.errors, out.stats);
  std::map<std::pair<std::string, int>, std::size_t> table_index;
  std::vector<std::string> f;
  while (reader.next(f)) {
    ++out.stats.rows_read;
    const std::size_t line = reader.line_number();
    const auto level = csv::parse_int(field(f, c_level));
    if (level && level_filter && (*level >= 1 && *level <= 3) && *level != *level_filter) {
      // Still part of the hierarchy, just not analysed.
      try {
        out.hierarchy.add({field(f, c_cause), field(f, c_cause_name), *level,
                           field(f, c_parent).empty() ? std::nullopt
                                                      : std::optional(field(f, c_parent))});
      } catch (const Error&) {
      }
      ++out.stats.rows_skipped;
      continue;
    }
    ++out.stats.rows_parsed;
    if (!level) {
      log.reject(line, ErrorKind::BadNumber, "bad level '" + field(f, c_level) + "'");
      continue;
    }
    if (*level < 1 || *level > 3) {
      log.reject(line, ErrorKind::UnknownLevel,
                 "cause '" + field(f, c_cause) + "' has level " + std::to_string(*level) +
                     ", expected 1-3");
      continue;
    }
    if (field(f, c_cause).empty()) {
      log.reject(line, ErrorKind::BadNumber, "empty cause_id");
      continue;
    }
    CauseId cause{field(f, c_cause), field(f, c_cause_name), *level,
                  field(f, c_parent).empty() ? std::nullopt : std::optional(field(f, c_parent))};
    const auto year = csv::parse_int(field(f, c_year));
    if (!year) {
      log.reject(line, ErrorKind::BadNumber, "bad year '" + field(f, c_year) + "'");
      continue;
    }
    const auto country = resolve_country(field(f, c_iso3), {}, aliases);
    if (!country) {
      log.reject(line, ErrorKind::BadCountryCode,
                 "unknown country code '" + field(f, c_iso3) + "'");
      continue;
    }

    MortalityEntry entry;
    const std::string& rate_cell = c_rate ? field(f, *c_rate) : field(f, SIZE_MAX);
    const std::string& pop_cell = c_pop ? field(f, *c_pop) : field(f, SIZE_MAX);
    const std::string& deaths_cell = field(f, c_deaths);
    if (!rate_cell.empty()) {
      const auto rate = csv::parse_double(rate_cell);
      if (!rate) {
        log.reject(line, ErrorKind::BadNumber, "bad rate_per_million '" + rate_cell + "'");
        continue;
      }
      if (*rate < 0.0) {
        log.reject(line, ErrorKind::NegativeDeaths, "negative rate_per_million " + rate_cell);
        continue;
      }
      entry.rate_per_million = *rate;
    }
    if (!deaths_cell.empty() || !entry.rate_per_million) {
      const auto deaths = csv::parse_double(deaths_cell);
      if (!deaths) {
        log.reject(line, ErrorKind::BadNumber, "bad deaths '" + deaths_cell + "'");
        continue;
      }
      if (*deaths < 0.0) {
        log.reject(line, ErrorKind::NegativeDeaths, "negative deaths " + deaths_cell);
        continue;
      }
      entry.deaths = *deaths;
    }
    if (!pop_cell.empty() || !entry.rate_per_million) {
      const auto pop = csv::parse_double(pop_cell);
      if (!pop || *pop <= 0.0) {
        log.reject(line, ErrorKind::NonpositivePopulation,
                   "population must be positive, got '" + pop_cell + "'");
        continue;
      }
      entry.population = *pop;
    }

    try {
      out.hierarchy.add(cause);
    } catch (const Error& e) {
      log.reject(line, e.kind(), e.what());
      continue;
    }
    auto [slot, inserted] = table_index.try_emplace({cause.id, *year}, out.tables.size());
    if (inserted) out.tables.push_back({cause, *year, {}});
    auto& table = out.tables[slot->second];
    if (!table.entries.emplace(*country, entry).second) {
      log.reject(line, ErrorKind::DuplicateEntry,
                 "duplicate row for " + country->iso3() + " in cause '" + cause.id + "' year " +
                     std::to_string(*year));
      continue;
    }
    log.accept();
  }
  out.hierarchy_errors = out.hierarchy.validate();
  return out;
}

MortalityData parse_mortality_file(const std::filesystem::path& path,
                                   std::optional<int> level_filter,
                                   const CountryAliasMap* aliases) {
  auto in = open_input(path);
  return read_mortality(in, level_filter, aliases);
}

IndicatorData read_indicator(std::istream& in, const std::string& name,
                             const CountryAliasMap* aliases) {
  if (name.empty()) throw Error(ErrorKind::MissingColumn, "indicator needs a non-empty name");
  csv::Reader reader(in);
  const std::string what = "indicator file '" + name + "'";
  const auto c_iso3 = reader.require("iso3", what);
  const auto c_value = reader.require("value", what);

  IndicatorData out;
  out.series.name = name;
  RowLog log(out.errors, out.stats);
  std::vector<std::string> f;
  while (reader.next(f)) {
    ++out.stats.rows_read;
    ++out.stats.rows_parsed;
    const std::size_t line = reader.line_number();
    const auto country = resolve_country(field(f, c_iso3), {}, aliases);
    if (!country) {
      log.reject(line, ErrorKind::BadCountryCode,
                 "unknown country code '" + field(f, c_iso3) + "'");
      continue;
    }
    const auto value = csv::parse_double(field(f, c_value));
    if (!value) {
      log.reject(line, ErrorKind::BadNumber,
                 "non-numeric value '" + field(f, c_value) + "' for " + country->iso3());
      continue;
    }
    if (!out.series.values.emplace(*country, *value).second) {
      log.reject(line, ErrorKind::DuplicateEntry, "duplicate row for " + country->iso3());
      continue;
    }
    log.accept();
  }
  return out;
}

IndicatorData parse_indicator_file(const std::filesystem::path& path, const std::string& name,
                                   const CountryAliasMap* aliases) {
  auto in = open_input(path);
  return read_indicator(in, name, aliases);
}

CountryAliasMap read_aliases(std::istream& in) {
  csv::Reader reader(in);
  const auto c_name = reader.require("name", "alias file");
  const auto c_iso3 = reader.require("iso3", "alias file");
  CountryAliasMap out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    try {
      out.add(field(f, c_name), field(f, c_iso3));
    } catch (const Error& e) {
      throw Error(e.kind(), line_prefix(reader.line_number()) + e.what());
    }
  }
  return out;
}

CountryAliasMap parse_alias_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_aliases(in);
}

void write_population(std::ostream& out, const PyramidSet& pyramids) {
  out << "iso3,name,year,sex,age_group,count\n";
  for (const auto& [country, pyramid] : pyramids) {
    const auto& scheme = pyramid.scheme();
    for (Sex sex : {Sex::male, Sex::female}) {
      for (int a = 0; a < scheme.age_groups(); ++a) {
        out << fmt::format("{},{},{},{},{},{}\n", country.iso3(), csv::escape(country.name()),
                           pyramid.year(), to_string(sex), scheme.age_label(a),
                           pyramid[AgeSexBin{sex, a}]);
      }
    }
  }
}

void write_mortality(std::ostream& out, const std::vector<MortalityTable>& tables) {
  out << "cause_id,cause_name,level,parent_id,iso3,year,deaths,population\n";
  for (const auto& table : tables) {
    for (const auto& [country, entry] : table.entries) {
      double deaths = entry.deaths;
      double population = entry.population.value_or(1e6);
      if (!entry.population) deaths = entry.rate_per_million.value_or(0.0);
      out << fmt::format("{},{},{},{},{},{},{},{}\n", csv::escape(table.cause.id),
                         csv::escape(table.cause.name), table.cause.level,
                         csv::escape(table.cause.parent.value_or("")), country.iso3(), table.year,
                         deaths, population);
    }
  }
}

std::set<CountryId> inner_join_keys(const std::set<CountryId>& a, const std::set<CountryId>& b) {
  std::set<CountryId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

namespace {

CountryId remap(const CountryId& c, const CountryAliasMap& aliases) {
  if (auto hit = aliases.lookup(c.iso3())) return CountryId(*hit, c.name());
  if (!c.name().empty()) {
    if (auto hit = aliases.lookup(c.name())) return CountryId(*hit, c.name());
  }
  return c;
}

}  // namespace

JoinedDataset join_countries(const PyramidSet& pyramids, const std::vector<MortalityTable>& tables,
                             const CountryAliasMap& aliases) {
  PyramidSet resolved;
  for (const auto& [country, pyramid] : pyramids) {
    const CountryId id = remap(country, aliases);
    std::vector<double> p(pyramid.proportions().begin(), pyramid.proportions().end());
    resolved.try_emplace(id, id, pyramid.year(), std::move(p), pyramid.scheme());
  }

  std::vector<MortalityTable> remapped;
  std::set<CountryId> mortality_countries;
  for (const auto& table : tables) {
    MortalityTable t{table.cause, table.year, {}};
    for (const auto& [country, entry] : table.entries) {
      const CountryId id = remap(country, aliases);
      t.entries.try_emplace(id, entry);
      mortality_countries.insert(id);
    }
    remapped.push_back(std::move(t));
  }

  std::set<CountryId> pyramid_countries;
  for (const auto& [country, _] : resolved) pyramid_countries.insert(country);
  const auto joined = inner_join_keys(pyramid_countries, mortality_countries);

  JoinedDataset out;
  for (const auto& [country, pyramid] : resolved) {
    if (joined.contains(country)) {
      out.pyramids.emplace(country, pyramid);
    } else {
      out.report.only_in_pyramids.push_back(country);
    }
  }
  for (const auto& country : mortality_countries) {
    if (!joined.contains(country)) out.report.only_in_mortality.push_back(country);
  }
  for (auto& table : remapped) {
    std::erase_if(table.entries, [&](const auto& kv) { return !joined.contains(kv.first); });
    out.tables.push_back(std::move(table));
  }
  return out;
}

}  // namespace popstat
