#include "popstat/synthetic.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "popstat/error.hpp"

namespace popstat {

std::string_view to_string(PyramidShape shape) noexcept {
  switch (shape) {
    case PyramidShape::expansive: return "expansive";
    case PyramidShape::stationary: return "stationary";
    case PyramidShape::constrictive: return "constrictive";
  }
  return "expansive";
}

std::optional<PyramidShape> parse_shape(std::string_view text) noexcept {
  if (text == "expansive") return PyramidShape::expansive;
  if (text == "stationary") return PyramidShape::stationary;
  if (text == "constrictive") return PyramidShape::constrictive;
  return std::nullopt;
}

PopulationPyramid generate_pyramid(const CountryId& country, int year,
                                   const PyramidShapeSpec& spec) {
  if (!(spec.factor > 0.0 && spec.factor <= 1.0)) {
    throw Error(ErrorKind::BadFactor, "shape factor must lie in (0, 1], got " +
                                          std::to_string(spec.factor));
  }
  if (!(spec.sex_ratio > 0.0 && spec.sex_ratio < 1.0)) {
    throw Error(ErrorKind::BadSexRatio, "sex ratio must lie in (0, 1), got " +
                                            std::to_string(spec.sex_ratio));
  }
  if (!(spec.jitter >= 0.0) || !std::isfinite(spec.jitter)) {
    throw Error(ErrorKind::BadFactor, "jitter must be a non-negative finite number");
  }

  const int groups = spec.scheme.age_groups();
  std::vector<double> mass(static_cast<std::size_t>(groups));
  for (int a = 0; a < groups; ++a) {
    double exponent = 0.0;
    switch (spec.shape) {
      case PyramidShape::expansive: exponent = a; break;
      case PyramidShape::constrictive: exponent = groups - 1 - a; break;
      case PyramidShape::stationary:
        exponent = a < kStationaryCutoff ? 0.0 : a - kStationaryCutoff + 1;
        break;
    }
    mass[static_cast<std::size_t>(a)] = std::pow(spec.factor, exponent);
  }

  std::vector<double> counts(spec.scheme.bin_count());
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int a = 0; a < groups; ++a) {
    const double m = mass[static_cast<std::size_t>(a)];
    counts[AgeSexBin{Sex::male, a}.index(spec.scheme)] = spec.sex_ratio * m;
    counts[AgeSexBin{Sex::female, a}.index(spec.scheme)] = (1.0 - spec.sex_ratio) * m;
  }
  if (spec.jitter > 0.0) {
    for (double& c : counts) c *= std::exp(spec.jitter * noise(rng));
  }
  return PopulationPyramid::from_counts(country, year, counts, spec.scheme);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Removes the mean and returns the Euclidean norm of what is left.
double center(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
  return std::sqrt(dot(v, v));
}

// Gram-Schmidt against an orthonormal basis; returns the residual norm.
double orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double c = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  }
  return std::sqrt(dot(v, v));
}

}  // namespace

MortalityTable generate_mortality(const PyramidSet& pyramids, const MortalitySpec& spec) {
  if (pyramids.size() < 4) {
    throw Error(ErrorKind::InsufficientCountries,
                "planted mortality needs at least 4 countries, got " +
                    std::to_string(pyramids.size()));
  }
  if (!(std::abs(spec.target_r) <= 1.0)) {
    throw Error(ErrorKind::BadFactor, "target_r must lie in [-1, 1]");
  }
  const auto dv = divergence_vector(spec.target_reference, pyramids, spec.smoothing);
  const std::size_t n = dv.values.size();

  std::vector<double> zx;
  zx.reserve(n);
  for (const auto& [_, d] : dv.values) zx.push_back(d);
  const double x_norm = center(zx);
  if (x_norm == 0.0) {
    throw Error(ErrorKind::DegenerateVariance,
                "divergences from " + spec.target_reference.iso3() + " are all equal");
  }
  for (double& x : zx) x /= x_norm;

  // Competitors ranked by |corr| with the target's divergence vector.
  std::vector<std::pair<double, std::vector<double>>> competitors;
  for (const auto& [country, _] : pyramids) {
    if (country == spec.target_reference) continue;
    std::vector<double> d;
    d.reserve(n);
    for (const auto& [__, v] : divergence_vector(country, pyramids, spec.smoothing).values) {
      d.push_back(v);
    }
    const double norm = center(d);
    if (norm == 0.0) continue;
    for (double& v : d) v /= norm;
    competitors.emplace_back(-std::abs(dot(d, zx)), std::move(d));
  }
  std::stable_sort(competitors.begin(), competitors.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t shield =
      std::min(spec.shielded_competitors.value_or((n - 1) / 2), n - 3);

  std::vector<std::vector<double>> basis{zx};
  for (std::size_t k = 0; k < competitors.size() && basis.size() < shield + 1; ++k) {
    auto v = competitors[k].second;
    const double norm = orthogonalize(v, basis);
    if (norm < 1e-9) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }

  std::mt19937_64 rng(spec.noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_pop(std::log(1e6), std::log(1e8));

  std::vector<double> e(n);
  double e_norm = 0.0;
  // A draw inside the shielded span is vanishingly unlikely; redraw if so.
  for (int attempt = 0; attempt < 16 && e_norm < 1e-9; ++attempt) {
    for (double& v : e) v = normal(rng);
    center(e);
    e_norm = orthogonalize(e, basis);
  }
  if (e_norm < 1e-9) {
    throw Error(ErrorKind::DegenerateVariance, "no noise direction left after shielding");
  }
  for (double& v : e) v /= e_norm;

  // zx and e are centred, orthonormal; scale to unit sample variance.
  const double unit = std::sqrt(static_cast<double>(n));
  const double rho = spec.target_r;
  const double rest = std::sqrt(std::max(0.0, 1.0 - rho * rho));

  MortalityTable table{spec.cause, spec.year, {}};
  std::size_t i = 0;
  for (const auto& [country, _] : dv.values) {
    const double y = unit * (rho * zx[i] + rest * e[i]);
    const double ln_rate = spec.log_rate_mean + spec.log_rate_scale * y;
    const double population = std::exp(log_pop(rng));
    MortalityEntry entry;
    entry.population = population;
    entry.deaths = std::exp(ln_rate) * population / 1e6;
    table.entries.emplace(country, entry);
    ++i;
  }
  return table;
}

}  // namespace popstat
