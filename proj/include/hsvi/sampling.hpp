#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hsvi/model_params.hpp"

namespace hsvi {

// Draws Heston parameter sets that satisfy every standing assumption
// (Feller and kappa - rho*sigma > 0) from a fixed-seed generator:
// kappa in [0.2, 5], theta in [0.01, 0.25], rho in [-0.95, 0.85],
// sigma in [0.05, 1] * sqrt(2 kappa theta), v0 in [0.5, 1.5] * theta.
// Identical seeds give identical sequences on every platform.
std::vector<HestonParams> sample_heston_params(std::size_t count, std::uint64_t seed);

}  // namespace hsvi
