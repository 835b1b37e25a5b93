#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "popstat/mortality.hpp"
#include "popstat/pyramid.hpp"

namespace popstat {

enum class PyramidShape { expansive, stationary, constrictive };

std::string_view to_string(PyramidShape shape) noexcept;
std::optional<PyramidShape> parse_shape(std::string_view text) noexcept;

/// Geometric per-stratum pyramid family.
///  - expansive: age-group mass factor^a, broad base.
///  - constrictive: mass factor^(A-1-a), weight shifted to older strata.
///  - stationary: flat below `kStationaryCutoff`, geometric decay above it.
/// `jitter` > 0 multiplies each bin by exp(jitter * N(0,1)) drawn from `seed`.
struct PyramidShapeSpec {
  PyramidShape shape = PyramidShape::expansive;
  double factor = 0.9;
  double sex_ratio = 0.5;
  std::uint64_t seed = 0;
  double jitter = 0.0;
  BinScheme scheme{};
};

inline constexpr int kStationaryCutoff = 13;  // 65+

/// Throws Error(BadFactor) for factor outside (0, 1] and Error(BadSexRatio)
/// for sex_ratio outside (0, 1).
[[nodiscard]] PopulationPyramid generate_pyramid(const CountryId& country, int year,
                                                 const PyramidShapeSpec& spec);

struct MortalitySpec {
  CountryId target_reference;
  double target_r = -0.8;
  std::uint64_t noise_seed = 0;
  CauseId cause{"synthetic", "Synthetic cause", 1, std::nullopt};
  int year = 2021;
  /// Mean log rate (nats of deaths per million) and its spread.
  double log_rate_mean = 5.0;
  double log_rate_scale = 1.0;
  double smoothing = kDefaultSmoothing;
  /// Number of competing references whose divergence vectors the noise is
  /// made orthogonal to (the ones most correlated with the target's). Unset:
  /// min(n - 3, (n - 1) / 2).
  std::optional<std::size_t> shielded_competitors;
};

/// Builds a table whose log rates correlate with the divergence from
/// `target_reference` at exactly target_r (up to rounding). The noise is
/// orthogonal to the target's divergence vector and to those of the shielded
/// competitors, so each shielded competitor j reaches only
/// |target_r * corr(d_j, d_target)| and the plant stays identifiable.
/// Throws Error(InsufficientCountries) below four pyramids.
[[nodiscard]] MortalityTable generate_mortality(const PyramidSet& pyramids,
                                                const MortalitySpec& spec);

}  // namespace popstat
