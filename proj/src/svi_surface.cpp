#include "hsvi/svi_surface.hpp"

#include <cmath>

#include "hsvi/errors.hpp"

namespace hsvi {

namespace {

// c + sqrt(y^2 + s^2) where sqrt(y^2 + s^2) >= |c| is guaranteed by the
// caller's algebra (y^2 + s^2 - c^2 = q >= 0). Avoids cancellation when c < 0.
double add_root(double c, double root, double q) {
    if (c >= 0) return c + root;
    return q / (root - c);
}

}  // namespace

double svi_omega_variance(const SVIOmegaParams& s, double x) {
    const double y = s.omega2 * x;
    const double rb2 = (1 - s.rho) * (1 + s.rho);
    const double u = y + s.rho;
    const double root = std::hypot(u, std::sqrt(rb2));
    // (u^2 + rb2) - (1 + rho y)^2 = y^2 rb2
    return s.omega1 / 2 * add_root(1 + s.rho * y, root, y * y * rb2);
}

double svi_raw_total_variance(const SVIRawParams& r, double k) {
    const double y = k - r.m;
    const double root = std::hypot(y, r.sigma_tilde);
    return r.T * (r.a + r.b * (r.rho_tilde * y + root));
}

double smile_minimum(const SVIOmegaParams& s) { return -2 * s.rho / s.omega2; }

WingSlopes wing_slopes(const SVIOmegaParams& s) {
    const double total = s.omega1 * s.omega2;
    return {-total * (1 - s.rho) / 2, total * (1 + s.rho) / 2};
}

WingSlopes raw_wing_slopes(const SVIRawParams& r) {
    return {-r.b * (1 - r.rho_tilde), r.b * (1 + r.rho_tilde)};
}

double omega1_small_vvol_approx(const HestonParams& p) {
    require_asymptotic(p);
    return p.theta * (1 + p.rho * p.sigma / (2 * p.kappa));
}

double omega1_large_vvol_approx(const HestonParams& p) {
    require_asymptotic(p);
    return 4 * p.kappa * p.theta / (p.sigma * (1 - p.rho)) * (1 - 2 * p.kappa / p.sigma);
}

SmileDiagnostics diagnostics(const SVIOmegaParams& s) {
    require_valid(s);
    auto slopes = wing_slopes(s);
    return {s.omega1, smile_minimum(s), slopes.left, slopes.right, s.rho};
}

}  // namespace hsvi
