#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "popstat/error.hpp"
#include "popstat/mortality.hpp"
#include "popstat/report.hpp"
#include "scratch_dir.hpp"

using namespace popstat;
using namespace popstat::report;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = POPSTAT_FIXTURE_DIR;

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig fixture_config(const ScratchDir& dir) {
  RunConfig c;
  c.population_path = kFixtures / "population_three.csv";
  c.mortality_path = kFixtures / "mortality_one.csv";
  c.output_dir = dir.path();
  return c;
}

std::string roundtrip(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TEST_CASE("format_number and file_stem") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1438410304722487) == "0.143841");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(file_stem("B.1/x y") == "B.1_x_y");
  CHECK(file_stem("") == "_");
}

TEST_CASE("config validation") {
  ScratchDir dir("validate");
  RunConfig c = fixture_config(dir);
  CHECK_NOTHROW(validate(c));
  auto bad = c;
  bad.smoothing = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.confidence = 1.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.level_filter = 4;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.output_dir.clear();
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.population_path.clear();
  CHECK_THROWS_AS(validate(bad), ConfigError);

  const auto np = parse_named_path("gdp=/tmp/gdp.csv");
  CHECK(np.name == "gdp");
  CHECK(np.path == fs::path("/tmp/gdp.csv"));
  CHECK_THROWS_AS((void)parse_named_path("gdp"), ConfigError);
  CHECK_THROWS_AS((void)parse_named_path("=x"), ConfigError);
}

TEST_CASE("divergence table") {
  ScratchDir dir("divergence");
  const RunConfig c = fixture_config(dir);
  std::ostringstream log;

  SUBCASE("reference row first with 0") {
    const auto path = cmd_divergence(c, "BBB", log);
    CHECK(path.filename() == "divergence_BBB.csv");
    const auto rows = read_rows(path);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"iso3", "name", "popdivergence"});
    CHECK(rows[1] == std::vector<std::string>{"BBB", "Beta, Republic of", "0"});
    const double d2 = std::stod(rows[2][2]);
    const double d3 = std::stod(rows[3][2]);
    CHECK(d2 <= d3);
  }

  SUBCASE("rerun is byte-identical") {
    const auto path = cmd_divergence(c, "AAA", log);
    const std::string first = slurp(path);
    cmd_divergence(c, "AAA", log);
    CHECK(slurp(path) == first);
  }

  SUBCASE("json keeps full precision") {
    RunConfig j = c;
    j.format = OutputFormat::json;
    const auto path = cmd_divergence(j, "AAA", log);
    CHECK(path.filename() == "divergence_AAA.json");
    const auto doc = nlohmann::json::parse(slurp(path));
    REQUIRE(doc["rows"].size() == 3);
    CHECK(doc["rows"][0]["iso3"] == "AAA");
    // Independent check of one entry.
    const auto pyr = parse_population_file(c.population_path, c.year, BinScheme{}).pyramids;
    const double expected = static_cast<double>(
        oracle::kl(oracle::to_vector(pyr.at(CountryId("CCC"))),
                   oracle::to_vector(pyr.at(CountryId("AAA"))), c.smoothing));
    for (const auto& row : doc["rows"]) {
      if (row["iso3"] == "CCC") CHECK(row["popdivergence"].get<double>() == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(cmd_divergence(c, "bbb", log), ConfigError);
    CHECK_THROWS_AS(cmd_divergence(c, "ZZZ", log), Error);
    RunConfig missing = c;
    missing.population_path = kFixtures / "no_such_file.csv";
    CHECK_THROWS_AS(cmd_divergence(missing, "AAA", log), Error);
  }
}

TEST_CASE("popstat table on fixtures") {
  ScratchDir dir("popstat");
  RunConfig c = fixture_config(dir);
  std::ostringstream log;

  SUBCASE("one cause") {
    const auto written = cmd_popstat(c, {"all"}, log);
    REQUIRE(written.size() == 3);
    const auto rows = read_rows(dir / "popstat.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size() == 14);
    CHECK(rows[0][0] == "cause_id");
    CHECK(rows[0][13] == "closest3");
    CHECK(rows[1][0] == "A");
    CHECK(rows[1][1] == "Alpha causes");
    CHECK(rows[1][9] == "3");
    CHECK(rows[1][10] == "0");
    CHECK(fs::exists(dir / "scatter_A.csv"));
    CHECK(read_rows(dir / "scatter_A.csv").size() == 4);
    CHECK(read_rows(dir / "popstat_errors.csv").size() == 1);
  }

  SUBCASE("filter that matches nothing gives an empty table") {
    c.level_filter = 3;
    cmd_popstat(c, {}, log);
    const auto rows = read_rows(dir / "popstat.csv");
    CHECK(rows.size() == 1);
  }

  SUBCASE("unknown cause is recorded, not fatal") {
    cmd_popstat(c, {"A", "NOPE"}, log);
    CHECK(read_rows(dir / "popstat.csv").size() == 2);
    const auto errors = read_rows(dir / "popstat_errors.csv");
    REQUIRE(errors.size() == 2);
    CHECK(errors[1][0] == "NOPE");
    CHECK(errors[1][2] == "UnknownCause");
  }

  SUBCASE("json") {
    c.format = OutputFormat::json;
    cmd_popstat(c, {}, log);
    const auto doc = nlohmann::json::parse(slurp(dir / "popstat.json"));
    REQUIRE(doc["results"].size() == 1);
    CHECK(doc["results"][0]["n"] == 3);
    CHECK(doc["results"][0]["closest"].size() == 2);
  }
}

TEST_CASE("compare table") {
  ScratchDir dir("compare");
  RunConfig c = fixture_config(dir);
  std::ostringstream log;

  SUBCASE("no indicators is a config error") {
    CHECK_THROWS_AS(cmd_compare(c, "A", log), ConfigError);
  }

  SUBCASE("indicator equal to the log rates gives r = 1") {
    const auto mort = parse_mortality_file(c.mortality_path, std::nullopt);
    const auto rates = log_rates(mort.tables.at(0));
    {
      std::ofstream out(dir / "same.csv");
      out << "iso3,value\n";
      for (const auto& [country, v] : rates.values) {
        out << country.iso3() << ',' << roundtrip(v) << '\n';
      }
    }
    c.indicator_paths = {{"same", dir / "same.csv"}, {"life", kFixtures / "indicator.csv"}};
    const auto path = cmd_compare(c, "A", log);
    const auto rows = read_rows(path);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"name", "r", "p", "ci_low", "ci_high", "n"});
    CHECK(rows[1][0] == "popstat");
    CHECK(rows[2][0] == "same");
    CHECK(rows[2][1] == "1");
    CHECK(rows[2][5] == "3");
    CHECK(rows[3][0] == "life");
  }

  SUBCASE("unknown cause is a data error") {
    c.indicator_paths = {{"life", kFixtures / "indicator.csv"}};
    CHECK_THROWS_AS(cmd_compare(c, "NOPE", log), Error);
  }
}

TEST_CASE("synthetic dataset") {
  SynthConfig s;
  s.countries = 12;
  s.causes = 3;
  s.seed = 5;
  const auto a = synthesize(s);
  const auto b = synthesize(s);
  REQUIRE(a.pyramids.size() == 12);
  REQUIRE(a.tables.size() == 3);
  CHECK(a.planted == b.planted);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a.tables[j].entries.size() == 12);
    const TuneResult t = tune_reference(a.pyramids, log_rates(a.tables[j]), {});
    CHECK(t.reference == a.planted[j]);
    CHECK(t.report.r == doctest::Approx(a.planted_r[j]).epsilon(1e-9));
  }

  SynthConfig bad = s;
  bad.countries = 3;
  CHECK_THROWS_AS((void)synthesize(bad), ConfigError);
  bad = s;
  bad.factor = 1.5;
  CHECK_THROWS_AS((void)synthesize(bad), ConfigError);
  bad = s;
  bad.reference = "QQQ";
  CHECK_THROWS_AS((void)synthesize(bad), ConfigError);
}

TEST_CASE("planted pipeline through files") {
  ScratchDir dir("pipeline");
  std::ostringstream log;
  SynthConfig s;
  s.countries = 15;
  s.causes = 4;
  s.seed = 3;
  s.output_dir = dir.path();
  const auto dataset = synthesize(s);
  cmd_synth(s, log);

  RunConfig c;
  c.population_path = dir / "population.csv";
  c.mortality_path = dir / "mortality.csv";
  c.output_dir = dir / "out";
  cmd_popstat(c, {}, log);

  const auto planted = read_rows(dir / "planted.csv");
  const auto rows = read_rows(dir / "out" / "popstat.csv");
  REQUIRE(planted.size() == 5);
  REQUIRE(rows.size() == 5);

  // Oracle on the re-read files.
  const auto pyr = parse_population_file(c.population_path, c.year, BinScheme{}).pyramids;
  const auto mort = parse_mortality_file(c.mortality_path, std::nullopt);
  std::map<std::string, std::vector<double>> plain;
  for (const auto& [id, p] : pyr) plain.emplace(id.iso3(), oracle::to_vector(p));

  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(rows[j + 1][0] == planted[j + 1][0]);
    CHECK(rows[j + 1][4] == planted[j + 1][1]);
    std::map<std::string, double> y;
    for (const auto& [id, v] : log_rates(mort.tables.at(j)).values) y.emplace(id.iso3(), v);
    const auto expected = oracle::enumerate_references(plain, y, c.smoothing);
    CHECK(rows[j + 1][4] == expected.reference);
    CHECK(std::stod(rows[j + 1][3]) == doctest::Approx(expected.r).epsilon(1e-5));
    CHECK(std::stod(rows[j + 1][3]) == doctest::Approx(dataset.planted_r[j]).epsilon(1e-4));
  }
}
