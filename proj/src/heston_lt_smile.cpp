#include "hsvi/heston_lt_smile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsvi/errors.hpp"
#include "hsvi/svi_surface.hpp"

namespace hsvi {

AsymptoticPipeline::AsymptoticPipeline(const HestonParams& p)
    : params_(p), constants_(derive_constants(p)) {
    kt_ = p.kappa * p.theta;
    srb2_ = p.sigma * p.sigma * (1 - p.rho) * (1 + p.rho);
    c_ = 2 * p.kappa - p.rho * p.sigma;
}

double AsymptoticPipeline::d_of_p(double p) const {
    const double lo = constants_.p_minus, hi = constants_.p_plus;
    const double slack = 1e-12 * (hi - lo);
    if (!std::isfinite(p) || p < lo - slack || p > hi + slack) {
        std::ostringstream os;
        os << "p = " << p << " lies outside the moment interval [" << lo << ", " << hi << "]";
        throw DomainError(os.str());
    }
    const double q = params_.kappa - params_.rho * params_.sigma * p;
    const double rad = q * q + params_.sigma * params_.sigma * p * (1 - p);
    return std::sqrt(std::max(rad, 0.0));
}

double AsymptoticPipeline::v_of_p(double p) const {
    const double d = d_of_p(p);
    const double q = params_.kappa - params_.rho * params_.sigma * p;
    if (q >= 0) {
        // q - d = -sigma^2 p (1 - p) / (q + d)
        return -kt_ * p * (1 - p) / (q + d);
    }
    return kt_ / (params_.sigma * params_.sigma) * (q - d);
}

double AsymptoticPipeline::p_star(double x) const {
    const double s = params_.sigma, rho = params_.rho;
    const double w = kt_ * rho + x * s;
    // Delta(x) = hypot(x sigma + k theta rho, k theta rho_bar), so |w / Delta| < 1.
    const double ratio = w / std::hypot(w, kt_ * constants_.rho_bar);
    const double num = s - 2 * params_.kappa * rho + ratio * constants_.eta;
    const double p = num / (2 * s * constants_.rho_bar * constants_.rho_bar);
    return std::clamp(p, constants_.p_minus, constants_.p_plus);
}

std::pair<double, double> AsymptoticPipeline::v_star_pair(double x) const {
    const double p = p_star(x);
    const double v = v_of_p(p);
    // p = 0 and p = 1 are admissible in the supremum, so V* >= max(0, x);
    // clamping removes rounding below those bounds.
    return {std::max(p * x - v, 0.0), std::max((p - 1) * x - v, 0.0)};
}

double AsymptoticPipeline::v_star(double x) const { return v_star_pair(x).first; }

double AsymptoticPipeline::v_star_closed(double x) const {
    const double k = params_.kappa, s = params_.sigma, rho = params_.rho;
    const double a = x * s * s - 2 * x * k * rho * s - 2 * k * kt_ + kt_ * rho * s;
    return (a + delta_of_x(x) * constants_.eta) / (2 * srb2_);
}

double AsymptoticPipeline::delta_of_x(double x) const {
    return std::hypot(x * params_.sigma + kt_ * params_.rho, kt_ * constants_.rho_bar);
}

double AsymptoticPipeline::phi_of_x(double x) const {
    auto [vs, vs_minus_x] = v_star_pair(x);
    return vs * vs_minus_x;
}

double AsymptoticPipeline::phi_closed(double x) const {
    const double f = constants_.eta * (kt_ + x * params_.rho * params_.sigma) - c_ * delta_of_x(x);
    return f * f / (4 * srb2_ * srb2_);
}

double AsymptoticPipeline::sign_polynomial(double x) const {
    const double w = kt_ + x * params_.rho * params_.sigma;
    return srb2_ * w * w - x * x * srb2_ * c_ * c_;
}

std::pair<double, double> AsymptoticPipeline::sign_polynomial_roots() const {
    return {-params_.theta / 2, constants_.theta_bar / 2};
}

double AsymptoticPipeline::asymptotic_variance_branch(double x, bool plus) const {
    auto [vs, vs_minus_x] = v_star_pair(x);
    const double phi = vs * vs_minus_x;
    double root;
    const double scale = std::abs(x) + std::abs(vs);
    if (phi < 1e-28 * scale * scale) {
        // Within rounding of a boundary point: use the factored square root.
        const double f =
            constants_.eta * (kt_ + x * params_.rho * params_.sigma) - c_ * delta_of_x(x);
        root = std::abs(f) / (2 * srb2_);
    } else {
        root = std::sqrt(phi);
    }
    const double a = 2 * vs - x;  // strictly positive
    if (plus) return 2 * (a + 2 * root);
    // a^2 - 4 phi = x^2
    return 2 * x * x / (a + 2 * root);
}

double AsymptoticPipeline::asymptotic_variance_pipeline(double x) const {
    const bool inside = x > -params_.theta / 2 && x < constants_.theta_bar / 2;
    return asymptotic_variance_branch(x, inside);
}

double AsymptoticPipeline::asymptotic_variance_closed(double x) const {
    const double s = params_.sigma;
    const double w = kt_ + params_.rho * s * x;
    const double delta = std::hypot(w, x * s * constants_.rho_bar);
    // w + Delta, rationalised when w < 0 (Delta^2 - w^2 = x^2 sigma^2 rho_bar^2)
    const double level = w >= 0 ? w + delta : x * x * srb2_ / (delta - w);
    // (eta - c) / (sigma^2 rho_bar^2) = 1 / (eta + c)
    return 2 * level / (constants_.eta + c_);
}

EquivalenceReport verify_equivalence(const AsymptoticPipeline& ctx, std::span<const double> grid,
                                     double tolerance) {
    if (grid.empty()) throw MalformedInputError("equivalence grid is empty");
    const SVIOmegaParams svi = heston_to_svi_omega(ctx.params());
    EquivalenceReport report;
    report.points.reserve(grid.size());
    for (double x : grid) {
        if (!std::isfinite(x)) throw MalformedInputError("equivalence grid must be finite");
        EquivalencePoint pt;
        pt.x = x;
        pt.pipeline = ctx.asymptotic_variance_pipeline(x);
        pt.closed = ctx.asymptotic_variance_closed(x);
        pt.svi = svi_omega_variance(svi, x);
        const double dev = std::max({std::abs(pt.pipeline - pt.closed),
                                     std::abs(pt.pipeline - pt.svi),
                                     std::abs(pt.closed - pt.svi)});
        pt.max_rel_deviation = dev / std::abs(pt.svi);
        report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
        if (pt.max_rel_deviation > report.max_rel_deviation || report.points.empty()) {
            report.max_rel_deviation = pt.max_rel_deviation;
            report.worst_x = x;
        }
        report.points.push_back(pt);
    }
    report.pass = report.max_rel_deviation <= tolerance;
    return report;
}

}  // namespace hsvi
