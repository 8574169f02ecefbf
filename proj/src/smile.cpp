#include "hsvi/smile.hpp"

#include <algorithm>
#include <cmath>

#include "hsvi/errors.hpp"

namespace hsvi {

const char* to_string(SmileSource s) {
    switch (s) {
        case SmileSource::priced: return "priced";
        case SmileSource::synthetic: return "synthetic";
        case SmileSource::file: return "file";
    }
    return "unknown";
}

Smile::Smile(double T, std::vector<SmilePoint> points, SmileSource source)
    : T_(T), points_(std::move(points)), source_(source) {
    if (!std::isfinite(T_) || !(T_ > 0)) throw MalformedInputError("smile maturity must be positive");
    for (const auto& pt : points_) {
        if (!std::isfinite(pt.k) || !std::isfinite(pt.vol) || !(pt.vol > 0))
            throw MalformedInputError("smile points need finite k and positive finite vol");
    }
    std::sort(points_.begin(), points_.end(),
              [](const SmilePoint& a, const SmilePoint& b) { return a.k < b.k; });
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].k == points_[i - 1].k)
            throw MalformedInputError("smile has duplicate log-moneyness values");
    }
}

}  // namespace hsvi
