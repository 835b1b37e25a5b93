#pragma once

#include <span>
#include <vector>

namespace popstat::detail {

// Both inputs already floored and renormalised.
double kl_of_smoothed(std::span<const double> p, std::span<const double> q);

void check_smoothing(double smoothing);

}  // namespace popstat::detail
