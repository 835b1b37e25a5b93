// popstat: population-pyramid divergence and mortality correlation CLI.

#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "popstat/error.hpp"
#include "popstat/report.hpp"

namespace {

using popstat::report::ConfigError;
using popstat::report::OutputFormat;
using popstat::report::RunConfig;

struct CommonFlags {
  std::string population;
  std::string mortality;
  std::vector<std::string> indicators;
  std::string aliases;
  int year = popstat::kDefaultYear;
  int level = 0;
  double smoothing = popstat::kDefaultSmoothing;
  double confidence = popstat::kDefaultConfidence;
  std::string output_dir;
  std::string format = "csv";
  int age_groups = popstat::BinScheme::kDefaultAgeGroups;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool needs_mortality, bool needs_indicators) {
  cmd.add_option("--population", f.population, "Population file (iso3,name,year,sex,age_group,count)");
  if (needs_mortality) {
    cmd.add_option("--mortality", f.mortality,
                   "Mortality file (cause_id,cause_name,level,parent_id,iso3,year,deaths,population)");
    cmd.add_option("--level", f.level, "Only analyse causes at this hierarchy level (1-3)");
  }
  if (needs_indicators) {
    cmd.add_option("--indicator", f.indicators, "Indicator file as name=path (iso3,value); repeatable");
  }
  cmd.add_option("--aliases", f.aliases, "Alias file (name,iso3)");
  cmd.add_option("--year", f.year, "Calendar year of the pyramids")->capture_default_str();
  cmd.add_option("--smoothing", f.smoothing, "Probability floor applied before the KL sum")
      ->capture_default_str();
  cmd.add_option("--confidence", f.confidence, "Confidence level of the Fisher interval")
      ->capture_default_str();
  cmd.add_option("--output-dir", f.output_dir, "Directory for result files")
      ->envname("POPSTAT_OUTPUT_DIR");
  cmd.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd.add_option("--age-groups", f.age_groups, "Five-year age groups per sex")
      ->capture_default_str();
}

RunConfig to_config(const CommonFlags& f) {
  RunConfig c;
  c.population_path = f.population;
  c.mortality_path = f.mortality;
  for (const auto& ind : f.indicators) {
    c.indicator_paths.push_back(popstat::report::parse_named_path(ind));
  }
  if (!f.aliases.empty()) c.alias_path = f.aliases;
  c.year = f.year;
  if (f.level != 0) c.level_filter = f.level;
  c.smoothing = f.smoothing;
  c.confidence = f.confidence;
  c.output_dir = f.output_dir;
  c.format = f.format == "json" ? OutputFormat::json : OutputFormat::csv;
  c.age_groups = f.age_groups;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population pyramid divergence and cause-specific mortality correlation"};
  app.set_config("--config", "", "Read options from a TOML/INI file (keys match flag names)");
  app.require_subcommand(1);

  CommonFlags div_flags;
  std::string reference;
  auto* divergence = app.add_subcommand("divergence", "Divergence of every pyramid from a reference");
  add_common(*divergence, div_flags, false, false);
  divergence->add_option("--reference", reference, "Reference country iso3")->required();

  CommonFlags pop_flags;
  std::vector<std::string> causes;
  auto* popstat_cmd = app.add_subcommand("popstat", "Tune the reference country per cause");
  add_common(*popstat_cmd, pop_flags, true, false);
  popstat_cmd->add_option("--causes", causes, "Cause ids, or 'all' (default)")->delimiter(',');

  CommonFlags cmp_flags;
  std::string cause;
  auto* compare = app.add_subcommand("compare", "Compare PoPStat with other indicators for a cause");
  add_common(*compare, cmp_flags, true, true);
  compare->add_option("--cause", cause, "Cause id")->required();

  popstat::report::SynthConfig synth_cfg;
  std::string synth_shape;
  double synth_factor = 0.0;
  double synth_sex_ratio = 0.0;
  double synth_target_r = 0.0;
  std::string synth_reference;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write synthetic population and mortality fixtures");
  synth->add_option("--countries", synth_cfg.countries, "Number of countries")->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed, "Random seed")->capture_default_str();
  synth->add_option("--shape", synth_shape, "Pyramid shape for every country (default: mixed)")
      ->check(CLI::IsMember({"expansive", "stationary", "constrictive"}));
  auto* factor_opt = synth->add_option("--factor", synth_factor, "Geometric factor per stratum, (0, 1]");
  auto* sex_opt = synth->add_option("--sex-ratio", synth_sex_ratio, "Male share, (0, 1)");
  synth->add_option("--jitter", synth_cfg.jitter, "Log-normal bin noise")->capture_default_str();
  synth->add_option("--causes", synth_cfg.causes, "Number of planted causes")->capture_default_str();
  synth->add_option("--reference", synth_reference, "Planted reference iso3 for every cause");
  auto* target_opt = synth->add_option("--target-r", synth_target_r, "Planted correlation, [-1, 1]");
  synth->add_option("--year", synth_cfg.year, "Calendar year")->capture_default_str();
  synth->add_option("--age-groups", synth_cfg.age_groups, "Five-year age groups per sex")
      ->capture_default_str();
  synth->add_option("--output-dir", synth_out, "Directory for fixture files")
      ->envname("POPSTAT_OUTPUT_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return popstat::report::kExitConfig;
  }

  try {
    // Test hook for the internal-error exit path.
    if (const char* fault = std::getenv("POPSTAT_FAULT"); fault && std::string(fault) == "internal") {
      throw std::logic_error("fault injected by POPSTAT_FAULT");
    }
    if (*divergence) {
      popstat::report::cmd_divergence(to_config(div_flags), reference, std::cerr);
    } else if (*popstat_cmd) {
      popstat::report::cmd_popstat(to_config(pop_flags), causes, std::cerr);
    } else if (*compare) {
      popstat::report::cmd_compare(to_config(cmp_flags), cause, std::cerr);
    } else if (*synth) {
      if (!synth_shape.empty()) synth_cfg.shape = popstat::parse_shape(synth_shape);
      if (factor_opt->count() > 0) synth_cfg.factor = synth_factor;
      if (sex_opt->count() > 0) synth_cfg.sex_ratio = synth_sex_ratio;
      if (target_opt->count() > 0) synth_cfg.target_r = synth_target_r;
      if (!synth_reference.empty()) synth_cfg.reference = synth_reference;
      synth_cfg.output_dir = synth_out;
      popstat::report::cmd_synth(synth_cfg, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return popstat::report::kExitConfig;
  } catch (const popstat::Error& e) {
    std::cerr << "data error [" << popstat::to_string(e.kind()) << "]: " << e.what() << "\n";
    return popstat::report::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return popstat::report::kExitInternal;
  }
  return popstat::report::kExitOk;
}
