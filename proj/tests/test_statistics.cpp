#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "popstat/error.hpp"
#include "popstat/mortality.hpp"
#include "popstat/statistics.hpp"

using namespace popstat;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected popstat::Error");
  return ErrorKind::BadNumber;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("ln_death_rate") {
  CHECK(std::abs(ln_death_rate(1000, 1e6) - 6.9078) < 1e-4);
  CHECK(ln_death_rate(1, 1e6) == 0.0);
  CHECK(ln_death_rate(10, 1e7) == 0.0);
  CHECK(kind_of([] { (void)ln_death_rate(0, 1e6); }) == ErrorKind::ZeroDeaths);
  CHECK(kind_of([] { (void)ln_death_rate(5, 0); }) == ErrorKind::NonpositivePopulation);
}

TEST_CASE("pearson_r") {
  const std::vector<double> x{0.3, 1.7, -2.0, 4.4, 0.9};
  std::vector<double> anti;
  for (double v : x) anti.push_back(-2 * v + 3);
  CHECK(std::abs(pearson_r(x, x) - 1.0) < 1e-12);
  CHECK(std::abs(pearson_r(x, anti) + 1.0) < 1e-12);
  CHECK(std::abs(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) - 0.9820) < 1e-4);
  CHECK(std::abs(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) -
                 0.9819805060619656) < 1e-14);

  CHECK(kind_of([] { (void)pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}); }) ==
        ErrorKind::LengthMismatch);
  CHECK(kind_of([] { (void)pearson_r(std::vector<double>{1, 2}, std::vector<double>{1, 2}); }) ==
        ErrorKind::TooFewPoints);
  CHECK(kind_of([] { (void)pearson_r(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) ==
        ErrorKind::DegenerateVariance);
}

TEST_CASE("pearson_r properties") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coef(0.1, 10.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t % 40);
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    const double r = pearson_r(x, y);
    REQUIRE(std::abs(r) <= 1.0 + 1e-12);
    REQUIRE(std::abs(r - oracle::pearson(x, y)) < 1e-10);

    const double a = coef(rng), b = shift(rng), c = coef(rng), d = shift(rng);
    std::vector<double> ax, cy, neg;
    for (double v : x) ax.push_back(a * v + b);
    for (double v : y) cy.push_back(c * v + d);
    for (double v : x) neg.push_back(-a * v + b);
    REQUIRE(std::abs(pearson_r(ax, cy) - r) < 1e-10);
    REQUIRE(std::abs(pearson_r(neg, cy) + r) < 1e-10);
  }
}

TEST_CASE("p_value") {
  CHECK(p_value(0.0, 180) == 1.0);
  CHECK(p_value(0.0, 5) == 1.0);
  // Frozen from an independent Student-t implementation.
  CHECK(p_value(0.143, 180) == doctest::Approx(0.05548815845649931).epsilon(1e-10));
  CHECK(p_value(0.162, 180) == doctest::Approx(0.029803766581866644).epsilon(1e-10));
  CHECK(p_value(0.5, 10) == doctest::Approx(0.14111328124999997).epsilon(1e-10));
  CHECK(p_value(0.3, 50) == doctest::Approx(0.03428618003292999).epsilon(1e-10));
  CHECK(p_value(-0.7, 5) == doctest::Approx(0.1881204043741872).epsilon(1e-10));
  CHECK(kind_of([] { (void)p_value(0.5, 2); }) == ErrorKind::TooFewPoints);

  double previous = 2.0;
  for (int i = 0; i <= 9; ++i) {
    const double p = p_value(0.1 * i, 180);
    CHECK(p < previous);
    previous = p;
  }
}

TEST_CASE("fisher_ci") {
  auto [lo, hi] = fisher_ci(0.5, 10, 0.95);
  CHECK(lo == doctest::Approx(-0.18918387068441586).epsilon(1e-10));
  CHECK(hi == doctest::Approx(0.8591534852092955).epsilon(1e-10));
  std::tie(lo, hi) = fisher_ci(-0.3, 50, 0.9);
  CHECK(lo == doctest::Approx(-0.5001050077824203).epsilon(1e-10));
  CHECK(hi == doctest::Approx(-0.06948091030246674).epsilon(1e-10));
  std::tie(lo, hi) = fisher_ci(0.0, 180, 0.95);
  CHECK(lo == doctest::Approx(-hi).epsilon(1e-15));
  CHECK(hi == doctest::Approx(0.14626331696786907).epsilon(1e-10));

  CHECK(kind_of([] { (void)fisher_ci(0.5, 3); }) == ErrorKind::TooFewPoints);
  CHECK(kind_of([] { (void)fisher_ci(1.0, 30); }) == ErrorKind::DegenerateVariance);
  CHECK(kind_of([] { (void)fisher_ci(0.2, 30, 1.0); }) == ErrorKind::BadConfidenceLevel);

  for (double r : {-0.8, -0.2, 0.0, 0.4, 0.9}) {
    double previous_width = 3.0;
    for (std::size_t n : {10, 50, 100, 180}) {
      const auto [l, h] = fisher_ci(r, n);
      CHECK(l < r);
      CHECK(r < h);
      CHECK(h - l < previous_width);
      previous_width = h - l;
    }
  }
}

TEST_CASE("correlation_report") {
  SUBCASE("three points") {
    const auto rep = correlation_report(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4});
    CHECK(std::abs(rep.r - 0.9820) < 1e-4);
    CHECK(std::abs(rep.r_squared - 0.9643) < 1e-4);
    CHECK(rep.n == 3);
    CHECK(rep.p_two_tailed == doctest::Approx(0.12103771832367706).epsilon(1e-9));
    CHECK(rep.ci_degenerate);
    CHECK(rep.ci_low <= rep.r);
    CHECK(rep.r <= rep.ci_high);
  }
  SUBCASE("perfect correlation") {
    const std::vector<double> x{1, 5, 2, 8, 3};
    const auto rep = correlation_report(x, x);
    CHECK(rep.r == 1.0);
    CHECK(rep.p_two_tailed == 0.0);
    CHECK(rep.ci_degenerate);
    CHECK(rep.ci_low == 1.0);
    CHECK(rep.ci_high == 1.0);
  }
  SUBCASE("r squared is exact") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 200; ++t) {
      const auto x = random_vector(rng, 25);
      const auto y = random_vector(rng, 25);
      const auto rep = correlation_report(x, y);
      REQUIRE(std::abs(rep.r_squared - rep.r * rep.r) < 1e-12);
      REQUIRE(rep.ci_low <= rep.r);
      REQUIRE(rep.r <= rep.ci_high);
      REQUIRE(rep.n == 25);
    }
  }
}

TEST_CASE("indicator_correlation joins on iso3") {
  LogRateSeries rates;
  rates.cause = CauseId{"IHD", "Ischemic heart disease", 3, "CVD"};
  IndicatorSeries ind{"copy", {}};
  const std::vector<std::pair<std::string, double>> data{
      {"AAA", 3.1}, {"BBB", 4.7}, {"CCC", 2.2}, {"DDD", 6.0}};
  for (const auto& [iso, v] : data) {
    rates.values.emplace(CountryId(iso), v);
    ind.values.emplace(CountryId(iso), v);
  }
  ind.values.emplace(CountryId("EEE"), 100.0);  // no rate, ignored
  CHECK(std::abs(indicator_correlation(ind, rates).r - 1.0) < 1e-12);
  CHECK(indicator_correlation(ind, rates).n == 4);

  IndicatorSeries disjoint{"elsewhere", {{CountryId("XAA"), 1.0}, {CountryId("XAB"), 2.0}, {CountryId("XAC"), 3.0}}};
  CHECK(kind_of([&] { (void)indicator_correlation(disjoint, rates); }) == ErrorKind::InsufficientOverlap);
}

TEST_CASE("log_rates drops zero-death countries") {
  MortalityTable t{CauseId{"X", "x", 1, std::nullopt}, 2021, {}};
  t.entries[CountryId("AAA")] = MortalityEntry{1000, 1e6, std::nullopt};
  t.entries[CountryId("BBB")] = MortalityEntry{0, 1e6, std::nullopt};
  t.entries[CountryId("CCC")] = MortalityEntry{0, std::nullopt, 250.0};
  t.entries[CountryId("DDD")] = MortalityEntry{0, std::nullopt, 0.0};
  const auto s = log_rates(t);
  CHECK(s.dropped == 2);
  REQUIRE(s.values.size() == 2);
  CHECK(s.values.at(CountryId("AAA")) == doctest::Approx(std::log(1000.0)));
  CHECK(s.values.at(CountryId("CCC")) == doctest::Approx(std::log(250.0)));
}
