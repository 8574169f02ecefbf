#pragma once

#include <string>
#include <vector>

namespace hsvi {

struct SmilePoint {
    double k = 0.0;    // log-moneyness log(K/F)
    double vol = 0.0;  // Black-Scholes implied volatility
};

enum class SmileSource { priced, synthetic, file };

const char* to_string(SmileSource s);

// Implied-volatility smile at a single maturity. Points are kept sorted by
// strictly increasing k; every vol is positive and finite.
class Smile {
public:
    Smile() = default;
    // Sorts the points; throws MalformedInputError on duplicate k, non-finite
    // values, non-positive vols or T <= 0.
    Smile(double T, std::vector<SmilePoint> points, SmileSource source);

    double maturity() const { return T_; }
    const std::vector<SmilePoint>& points() const { return points_; }
    SmileSource source() const { return source_; }
    std::size_t size() const { return points_.size(); }

private:
    double T_ = 0.0;
    std::vector<SmilePoint> points_;
    SmileSource source_ = SmileSource::synthetic;
};

}  // namespace hsvi
