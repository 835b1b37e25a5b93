#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "popstat/ingestion.hpp"
#include "popstat/synthetic.hpp"
#include "popstat/tuning.hpp"

namespace popstat::report {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

/// Invalid or missing configuration (exit code 2). Data problems raise
/// popstat::Error instead (exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct NamedPath {
  std::string name;
  std::filesystem::path path;
};

struct RunConfig {
  std::filesystem::path population_path;
  std::filesystem::path mortality_path;
  std::vector<NamedPath> indicator_paths;
  std::optional<std::filesystem::path> alias_path;
  int year = kDefaultYear;
  std::optional<int> level_filter;
  double smoothing = kDefaultSmoothing;
  double confidence = kDefaultConfidence;
  std::filesystem::path output_dir;
  OutputFormat format = OutputFormat::csv;
  int age_groups = BinScheme::kDefaultAgeGroups;
};

/// Throws ConfigError on the first invalid field.
void validate(const RunConfig& config);

/// Parses "name=path".
[[nodiscard]] NamedPath parse_named_path(const std::string& text);

/// Six significant digits, the precision of every CSV number.
[[nodiscard]] std::string format_number(double value);

/// Reserved file-name characters in a cause id become '_'.
[[nodiscard]] std::string file_stem(const std::string& cause_id);

/// Writes divergence_<ref>.{csv,json}, ascending by divergence then iso3.
std::filesystem::path cmd_divergence(const RunConfig& config, const std::string& reference,
                                     std::ostream& log);

/// Writes popstat.{csv,json}, popstat_errors.csv and one scatter_<cause>.csv
/// per successful cause. An empty `causes` list means every cause that
/// passes the level filter.
std::vector<std::filesystem::path> cmd_popstat(const RunConfig& config,
                                               const std::vector<std::string>& causes,
                                               std::ostream& log);

/// Writes compare_<cause>.{csv,json}: a popstat row followed by one row per
/// indicator, in configuration order.
std::filesystem::path cmd_compare(const RunConfig& config, const std::string& cause_id,
                                  std::ostream& log);

struct SynthConfig {
  std::size_t countries = 20;
  std::uint64_t seed = 1;
  /// Unset: shapes cycle expansive, stationary, constrictive.
  std::optional<PyramidShape> shape;
  /// Unset: drawn per country from the seed.
  std::optional<double> factor;
  std::optional<double> sex_ratio;
  double jitter = 0.03;
  std::size_t causes = 1;
  /// Unset: chosen per cause from the seed.
  std::optional<std::string> reference;
  /// Unset: alternates -0.85 / 0.8 by cause.
  std::optional<double> target_r;
  int year = kDefaultYear;
  int age_groups = BinScheme::kDefaultAgeGroups;
  std::filesystem::path output_dir;
};

struct SynthDataset {
  PyramidSet pyramids;
  std::vector<MortalityTable> tables;
  /// Planted reference per table, same order.
  std::vector<CountryId> planted;
  std::vector<double> planted_r;
};

/// Deterministic in `config.seed`. Throws ConfigError on bad flags.
[[nodiscard]] SynthDataset synthesize(const SynthConfig& config);

/// Writes population.csv, mortality.csv and planted.csv.
std::vector<std::filesystem::path> cmd_synth(const SynthConfig& config, std::ostream& log);

}  // namespace popstat::report
