#include "popstat/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "csv.hpp"

namespace popstat::report {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

void require_path(const fs::path& p, const char* flag) {
  if (p.empty()) throw ConfigError(std::string("missing required option --") + flag);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::FileNotFound, "cannot write '" + path.string() + "'");
  return out;
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
}

void report_row_errors(std::ostream& log, const std::string& source,
                       const std::vector<RowError>& errors) {
  for (const auto& e : errors) {
    log << "warning: " << source << " " << e.message << " [" << to_string(e.kind) << "]\n";
  }
}

std::optional<CountryAliasMap> load_aliases(const RunConfig& config) {
  if (!config.alias_path) return std::nullopt;
  return parse_alias_file(*config.alias_path);
}

PyramidSet load_pyramids(const RunConfig& config, const CountryAliasMap* aliases,
                         std::ostream& log) {
  auto data = parse_population_file(config.population_path, config.year,
                                    BinScheme(config.age_groups), aliases);
  report_row_errors(log, config.population_path.string(), data.errors);
  if (data.pyramids.empty()) {
    throw Error(ErrorKind::AllZero, "population file '" + config.population_path.string() +
                                        "' has no usable pyramid for year " +
                                        std::to_string(config.year));
  }
  return std::move(data.pyramids);
}

struct Analysis {
  JoinedDataset joined;
  CauseHierarchy hierarchy;
};

Analysis load_analysis(const RunConfig& config, std::ostream& log) {
  require_path(config.mortality_path, "mortality");
  const auto aliases = load_aliases(config);
  const CountryAliasMap* alias_ptr = aliases ? &*aliases : nullptr;
  PyramidSet pyramids = load_pyramids(config, alias_ptr, log);
  auto mortality = parse_mortality_file(config.mortality_path, config.level_filter, alias_ptr);
  report_row_errors(log, config.mortality_path.string(), mortality.errors);
  for (const auto& h : mortality.hierarchy_errors) log << "warning: cause hierarchy: " << h << "\n";

  Analysis out{join_countries(pyramids, mortality.tables, aliases.value_or(CountryAliasMap{})),
               std::move(mortality.hierarchy)};
  const auto& report = out.joined.report;
  log << "joined " << out.joined.pyramids.size() << " countries";
  if (!report.empty()) {
    log << " (" << report.only_in_pyramids.size() << " only in population, "
        << report.only_in_mortality.size() << " only in mortality)";
  }
  log << "\n";
  for (const auto& c : report.only_in_pyramids) log << "  population only: " << c.iso3() << "\n";
  for (const auto& c : report.only_in_mortality) log << "  mortality only: " << c.iso3() << "\n";
  return out;
}

TuningOptions tuning_options(const RunConfig& config) {
  TuningOptions o;
  o.smoothing = config.smoothing;
  o.confidence_level = config.confidence;
  o.year = config.year;
  return o;
}

std::string ext(const RunConfig& config) {
  return config.format == OutputFormat::json ? ".json" : ".csv";
}

void write_json(const fs::path& path, const Json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << "\n";
}

const MortalityTable* find_table(const std::vector<MortalityTable>& tables, const std::string& id,
                                 int year) {
  const MortalityTable* best = nullptr;
  for (const auto& t : tables) {
    if (t.cause.id != id) continue;
    if (t.year == year) return &t;
    if (best == nullptr || t.year > best->year) best = &t;
  }
  return best;
}

Json report_json(const CorrelationReport& r) {
  return Json{{"r", r.r},
              {"p", r.p_two_tailed},
              {"ci_low", r.ci_low},
              {"ci_high", r.ci_high},
              {"ci_degenerate", r.ci_degenerate},
              {"r_squared", r.r_squared},
              {"n", r.n}};
}

}  // namespace

void validate(const RunConfig& config) {
  require_path(config.population_path, "population");
  if (config.output_dir.empty()) {
    throw ConfigError("missing required option --output-dir (or POPSTAT_OUTPUT_DIR)");
  }
  if (!(config.smoothing > 0.0) || !std::isfinite(config.smoothing)) {
    throw ConfigError("--smoothing must be a positive number");
  }
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw ConfigError("--confidence must lie in (0, 1)");
  }
  if (config.level_filter && (*config.level_filter < 1 || *config.level_filter > 3)) {
    throw ConfigError("--level must be 1, 2 or 3");
  }
  if (config.age_groups < 1) throw ConfigError("--age-groups must be positive");
  for (const auto& ind : config.indicator_paths) {
    if (ind.name.empty() || ind.path.empty()) {
      throw ConfigError("--indicator expects name=path");
    }
  }
}

NamedPath parse_named_path(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError("expected name=path, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  return fmt::format("{:.6g}", value);
}

std::string file_stem(const std::string& cause_id) {
  std::string out = cause_id;
  for (char& c : out) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!keep) c = '_';
  }
  return out.empty() ? "_" : out;
}

fs::path cmd_divergence(const RunConfig& config, const std::string& reference, std::ostream& log) {
  validate(config);
  if (!is_valid_iso3(reference)) {
    throw ConfigError("--reference must be an uppercase iso3 code, got '" + reference + "'");
  }
  const auto aliases = load_aliases(config);
  const PyramidSet pyramids = load_pyramids(config, aliases ? &*aliases : nullptr, log);
  const auto dv = divergence_vector(CountryId(reference), pyramids, config.smoothing);

  std::vector<std::pair<double, CountryId>> rows;
  for (const auto& [country, d] : dv.values) rows.emplace_back(d, pyramids.at(country).country());
  std::sort(rows.begin(), rows.end());

  prepare_output_dir(config.output_dir);
  const fs::path path = config.output_dir / ("divergence_" + reference + ext(config));
  if (config.format == OutputFormat::json) {
    Json doc{{"reference", reference}, {"smoothing", config.smoothing}, {"rows", Json::array()}};
    for (const auto& [d, c] : rows) {
      doc["rows"].push_back({{"iso3", c.iso3()}, {"name", c.name()}, {"popdivergence", d}});
    }
    write_json(path, doc);
  } else {
    auto out = open_output(path);
    out << "iso3,name,popdivergence\n";
    for (const auto& [d, c] : rows) {
      out << c.iso3() << ',' << csv::escape(c.name()) << ',' << format_number(d) << '\n';
    }
  }
  log << "wrote " << path.string() << "\n";
  return path;
}

std::vector<fs::path> cmd_popstat(const RunConfig& config, const std::vector<std::string>& causes,
                                  std::ostream& log) {
  validate(config);
  const Analysis analysis = load_analysis(config, log);
  const auto& tables = analysis.joined.tables;

  std::vector<CauseId> selected;
  const bool all = causes.empty() || (causes.size() == 1 && causes.front() == "all");
  if (all) {
    std::vector<std::string> seen;
    for (const auto& t : tables) {
      if (std::find(seen.begin(), seen.end(), t.cause.id) != seen.end()) continue;
      seen.push_back(t.cause.id);
      selected.push_back(t.cause);
    }
  } else {
    for (const auto& id : causes) {
      const CauseId* known = analysis.hierarchy.find(id);
      selected.push_back(known ? *known : CauseId{id, id, 1, std::nullopt});
    }
  }

  const auto batch = popstat_batch(selected, analysis.joined.pyramids, tables,
                                   tuning_options(config));

  prepare_output_dir(config.output_dir);
  std::vector<fs::path> written;
  const fs::path results_path = config.output_dir / ("popstat" + ext(config));
  const fs::path errors_path = config.output_dir / "popstat_errors.csv";

  Json doc{{"smoothing", config.smoothing},
           {"confidence", config.confidence},
           {"results", Json::array()},
           {"errors", Json::array()}};
  std::ofstream csv_out;
  if (config.format == OutputFormat::csv) {
    csv_out = open_output(results_path);
    csv_out << "cause_id,cause_name,level,r,reference_iso3,p,ci_low,ci_high,r_squared,n,"
               "dropped,closest1,closest2,closest3\n";
  }
  auto errors_out = open_output(errors_path);
  errors_out << "cause_id,cause_name,error,message\n";

  for (const auto& entry : batch) {
    if (const auto* failure = std::get_if<CauseFailure>(&entry.outcome)) {
      errors_out << csv::escape(entry.cause.id) << ',' << csv::escape(entry.cause.name) << ','
                 << to_string(failure->kind) << ',' << csv::escape(failure->message) << '\n';
      doc["errors"].push_back({{"cause_id", entry.cause.id},
                               {"cause_name", entry.cause.name},
                               {"error", std::string(to_string(failure->kind))},
                               {"message", failure->message}});
      log << "cause " << entry.cause.id << " failed: " << failure->message << "\n";
      continue;
    }
    const auto& res = std::get<PoPStatResult>(entry.outcome);
    const auto& rep = res.report;
    if (config.format == OutputFormat::csv) {
      csv_out << csv::escape(res.cause.id) << ',' << csv::escape(res.cause.name) << ','
              << res.cause.level << ',' << format_number(rep.r) << ',' << res.reference.iso3()
              << ',' << format_number(rep.p_two_tailed) << ',' << format_number(rep.ci_low) << ','
              << format_number(rep.ci_high) << ',' << format_number(rep.r_squared) << ','
              << rep.n << ',' << res.dropped_countries;
      for (std::size_t i = 0; i < 3; ++i) {
        csv_out << ',' << (i < res.closest.size() ? res.closest[i].iso3() : std::string{});
      }
      csv_out << '\n';
    } else {
      Json row{{"cause_id", res.cause.id},
               {"cause_name", res.cause.name},
               {"level", res.cause.level},
               {"reference_iso3", res.reference.iso3()}};
      row.update(report_json(rep));
      row["dropped"] = res.dropped_countries;
      row["closest"] = Json::array();
      for (const auto& c : res.closest) row["closest"].push_back(c.iso3());
      doc["results"].push_back(std::move(row));
    }

    const fs::path scatter_path = config.output_dir / ("scatter_" + file_stem(res.cause.id) + ".csv");
    auto scatter = open_output(scatter_path);
    scatter << "iso3,popdivergence,ln_rate\n";
    for (const auto& pt : res.scatter) {
      scatter << pt.country.iso3() << ',' << format_number(pt.popdivergence) << ','
              << format_number(pt.ln_rate) << '\n';
    }
    written.push_back(scatter_path);
  }
  if (config.format == OutputFormat::json) write_json(results_path, doc);
  written.insert(written.begin(), {results_path, errors_path});
  log << "wrote " << results_path.string() << " (" << batch.size() << " causes)\n";
  return written;
}

fs::path cmd_compare(const RunConfig& config, const std::string& cause_id, std::ostream& log) {
  validate(config);
  if (config.indicator_paths.empty()) {
    throw ConfigError("compare needs at least one --indicator name=path");
  }
  if (cause_id.empty()) throw ConfigError("missing required option --cause");
  const Analysis analysis = load_analysis(config, log);
  const MortalityTable* table = find_table(analysis.joined.tables, cause_id, config.year);
  if (table == nullptr) {
    throw Error(ErrorKind::UnknownCause, "no mortality data for cause '" + cause_id + "'");
  }
  const auto result = popstat(table->cause, analysis.joined.pyramids, analysis.joined.tables,
                              tuning_options(config));
  const LogRateSeries rates = log_rates(*table);

  std::vector<std::pair<std::string, CorrelationReport>> rows;
  rows.emplace_back("popstat", result.report);
  const auto aliases = load_aliases(config);
  for (const auto& ind : config.indicator_paths) {
    auto data = parse_indicator_file(ind.path, ind.name, aliases ? &*aliases : nullptr);
    report_row_errors(log, ind.path.string(), data.errors);
    // Same country sample as the popstat row.
    std::erase_if(data.series.values,
                  [&](const auto& kv) { return !analysis.joined.pyramids.contains(kv.first); });
    rows.emplace_back(ind.name, indicator_correlation(data.series, rates, config.confidence));
  }

  prepare_output_dir(config.output_dir);
  const fs::path path = config.output_dir / ("compare_" + file_stem(cause_id) + ext(config));
  if (config.format == OutputFormat::json) {
    Json doc{{"cause_id", table->cause.id},
             {"cause_name", table->cause.name},
             {"reference_iso3", result.reference.iso3()},
             {"rows", Json::array()}};
    for (const auto& [name, rep] : rows) {
      Json row{{"name", name}};
      row.update(report_json(rep));
      doc["rows"].push_back(std::move(row));
    }
    write_json(path, doc);
  } else {
    auto out = open_output(path);
    out << "name,r,p,ci_low,ci_high,n\n";
    for (const auto& [name, rep] : rows) {
      out << csv::escape(name) << ',' << format_number(rep.r) << ','
          << format_number(rep.p_two_tailed) << ',' << format_number(rep.ci_low) << ','
          << format_number(rep.ci_high) << ',' << rep.n << '\n';
    }
  }
  log << "wrote " << path.string() << "\n";
  return path;
}

SynthDataset synthesize(const SynthConfig& config) {
  if (config.countries < 4 || config.countries > 26 * 26) {
    throw ConfigError("--countries must lie in [4, 676]");
  }
  if (config.causes < 1) throw ConfigError("--causes must be at least 1");
  if (config.factor && !(*config.factor > 0.0 && *config.factor <= 1.0)) {
    throw ConfigError("--factor must lie in (0, 1]");
  }
  if (config.sex_ratio && !(*config.sex_ratio > 0.0 && *config.sex_ratio < 1.0)) {
    throw ConfigError("--sex-ratio must lie in (0, 1)");
  }
  if (config.target_r && !(std::abs(*config.target_r) <= 1.0)) {
    throw ConfigError("--target-r must lie in [-1, 1]");
  }
  if (!(config.jitter >= 0.0)) throw ConfigError("--jitter must be non-negative");
  if (config.age_groups < 1) throw ConfigError("--age-groups must be positive");

  SynthDataset out;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> factor_dist(0.7, 0.97);
  std::uniform_real_distribution<double> sex_dist(0.46, 0.54);
  const BinScheme scheme(config.age_groups);
  std::vector<CountryId> ids;
  for (std::size_t i = 0; i < config.countries; ++i) {
    const std::string code{'X', static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26)};
    CountryId id(code, fmt::format("Synthland {:03}", i + 1));
    PyramidShapeSpec spec;
    spec.shape = config.shape.value_or(static_cast<PyramidShape>(i % 3));
    const double drawn_factor = factor_dist(rng);
    const double drawn_sex = sex_dist(rng);
    spec.factor = config.factor.value_or(drawn_factor);
    spec.sex_ratio = config.sex_ratio.value_or(drawn_sex);
    spec.jitter = config.jitter;
    spec.seed = config.seed * 1000003ULL + i;
    spec.scheme = scheme;
    out.pyramids.emplace(id, generate_pyramid(id, config.year, spec));
    ids.push_back(id);
  }

  std::optional<CountryId> fixed_reference;
  if (config.reference) {
    if (!is_valid_iso3(*config.reference)) {
      throw ConfigError("--reference must be an uppercase iso3 code");
    }
    fixed_reference = CountryId(*config.reference);
    if (!out.pyramids.contains(*fixed_reference)) {
      throw ConfigError("--reference " + *config.reference + " is not a generated country");
    }
  }

  for (std::size_t j = 0; j < config.causes; ++j) {
    MortalitySpec spec;
    spec.target_reference = fixed_reference.value_or(ids[(j * 7 + config.seed) % ids.size()]);
    spec.target_r = config.target_r.value_or(j % 2 == 0 ? -0.85 : 0.8);
    spec.noise_seed = config.seed * 7919ULL + j;
    spec.cause = CauseId{fmt::format("SYN{}", j + 1), fmt::format("Synthetic cause {}", j + 1), 1,
                         std::nullopt};
    spec.year = config.year;
    spec.log_rate_mean = 4.0 + static_cast<double>(j % 4);
    out.tables.push_back(generate_mortality(out.pyramids, spec));
    out.planted.push_back(spec.target_reference);
    out.planted_r.push_back(spec.target_r);
  }
  return out;
}

std::vector<fs::path> cmd_synth(const SynthConfig& config, std::ostream& log) {
  if (config.output_dir.empty()) {
    throw ConfigError("missing required option --output-dir (or POPSTAT_OUTPUT_DIR)");
  }
  const SynthDataset data = synthesize(config);
  prepare_output_dir(config.output_dir);
  const fs::path pop = config.output_dir / "population.csv";
  const fs::path mort = config.output_dir / "mortality.csv";
  const fs::path planted = config.output_dir / "planted.csv";
  {
    auto out = open_output(pop);
    write_population(out, data.pyramids);
  }
  {
    auto out = open_output(mort);
    write_mortality(out, data.tables);
  }
  {
    auto out = open_output(planted);
    out << "cause_id,reference_iso3,target_r\n";
    for (std::size_t j = 0; j < data.tables.size(); ++j) {
      out << data.tables[j].cause.id << ',' << data.planted[j].iso3() << ','
          << fmt::format("{}", data.planted_r[j]) << '\n';
    }
  }
  log << "wrote " << data.pyramids.size() << " pyramids and " << data.tables.size()
      << " causes to " << config.output_dir.string() << "\n";
  return {pop, mort, planted};
}

}  // namespace popstat::report
