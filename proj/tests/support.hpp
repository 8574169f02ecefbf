#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>

#include "hsvi/model_params.hpp"

namespace hsvi::testing {

inline constexpr HestonParams kP0{1.0, 0.04, 0.25, -0.5, 0.04};

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Integrates the Heston Riccati system with classical RK4:
//   D' = alpha - beta D + sigma^2 D^2 / 2,  C' = kappa theta D.
inline std::complex<double> riccati_cf(const HestonParams& p, std::complex<double> z, double T,
                                       int steps = 20000) {
    using c = std::complex<double>;
    const c i(0.0, 1.0);
    const c alpha = -(z * z + i * z) / 2.0;
    const c beta = p.kappa - p.rho * p.sigma * i * z;
    auto f = [&](c D) { return alpha - beta * D + 0.5 * p.sigma * p.sigma * D * D; };
    const double h = T / steps;
    c D = 0.0, C = 0.0;
    for (int n = 0; n < steps; ++n) {
        const c k1 = f(D);
        const c k2 = f(D + 0.5 * h * k1);
        const c k3 = f(D + 0.5 * h * k2);
        const c k4 = f(D + h * k3);
        C += p.kappa * p.theta * h * (D + 2.0 * (D + 0.5 * h * k1) + 2.0 * (D + 0.5 * h * k2) + (D + h * k3)) / 6.0;
        D += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    return std::exp(C + p.v0 * D);
}

// Limiting cumulant straight from its definition.
inline double cumulant(const HestonParams& p, double q) {
    const double a = p.kappa - p.rho * p.sigma * q;
    const double d = std::sqrt(a * a + p.sigma * p.sigma * q * (1.0 - q));
    return p.kappa * p.theta / (p.sigma * p.sigma) * (a - d);
}

// sup_q (q x - V(q)) by golden-section search on [lo, hi].
inline std::pair<double, double> legendre_golden(const HestonParams& p, double x, double lo,
                                                 double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double q) { return q * x - cumulant(p, q); };
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        if (fc > fd) {
            b = d, d = c, fd = fc;
            c = b - g * (b - a), fc = f(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + g * (b - a), fd = f(d);
        }
    }
    const double q = 0.5 * (a + b);
    return {q, f(q)};
}

// Composite Simpson on [0, U] of the Lewis integrand, with the CF in the
// "little trap" closed form. Slow and plain on purpose.
inline double lewis_call_simpson(const HestonParams& p, double k, double T, double U = 200.0,
                                 int n = 200000) {
    using c = std::complex<double>;
    const c i(0.0, 1.0);
    auto cf = [&](c z) {
        const c beta = p.kappa - p.rho * p.sigma * i * z;
        const c d = std::sqrt(beta * beta + p.sigma * p.sigma * (z * z + i * z));
        const c g = (beta - d) / (beta + d);
        const c e = std::exp(-d * T);
        const c C = p.kappa * p.theta / (p.sigma * p.sigma) *
                    ((beta - d) * T - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
        const c D = (beta - d) / (p.sigma * p.sigma) * (1.0 - e) / (1.0 - g * e);
        return std::exp(C + p.v0 * D);
    };
    auto f = [&](double u) {
        return std::real(std::exp(-i * u * k) * cf(u - 0.5 * i)) / (u * u + 0.25);
    };
    const double h = U / n;
    double s = f(0.0) + f(U);
    for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * f(j * h);
    return 1.0 - std::exp(0.5 * k) / M_PI * s * h / 3.0;
}

inline std::pair<double, double> quadratic_roots(double a, double b, double c) {
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(disc, b));
    const double r1 = q / a, r2 = c / q;
    return r1 < r2 ? std::pair{r1, r2} : std::pair{r2, r1};
}

}  // namespace hsvi::testing
