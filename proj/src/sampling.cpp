#include "hsvi/sampling.hpp"

#include <cmath>

namespace hsvi {

namespace {

// std::uniform_real_distribution is implementation-defined; map the raw
// 64-bit output ourselves to keep sequences portable.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double between(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

}  // namespace

std::vector<HestonParams> sample_heston_params(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<HestonParams> out;
    out.reserve(count);
    while (out.size() < count) {
        HestonParams p;
        p.kappa = between(rng, 0.2, 5.0);
        p.theta = between(rng, 0.01, 0.25);
        p.rho = between(rng, -0.95, 0.85);
        p.sigma = between(rng, 0.05, 1.0) * std::sqrt(2 * p.kappa * p.theta);
        p.v0 = between(rng, 0.5, 1.5) * p.theta;
        if (validate_heston(p).ok()) out.push_back(p);
    }
    return out;
}

}  // namespace hsvi
