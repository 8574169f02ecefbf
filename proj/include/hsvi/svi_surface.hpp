#pragma once

#include "hsvi/model_params.hpp"

namespace hsvi {

// Implied variance of the omega-form SVI curve at scaled log-moneyness x.
double svi_omega_variance(const SVIOmegaParams& s, double x);

// Implied total variance T * sigma^2(k) of the raw SVI curve at log-strike k.
double svi_raw_total_variance(const SVIRawParams& r, double k);

// Location x* = -2 rho / omega2 of the variance minimum.
double smile_minimum(const SVIOmegaParams& s);

struct WingSlopes {
    double left = 0.0;   // d sigma^2 / dx as x -> -inf (non-positive)
    double right = 0.0;  // d sigma^2 / dx as x -> +inf (non-negative)
};

// Asymptotic slopes of the omega-form variance in x.
WingSlopes wing_slopes(const SVIOmegaParams& s);
// Asymptotic slopes of the raw-form variance in k at fixed T: -b(1-rho), b(1+rho).
WingSlopes raw_wing_slopes(const SVIRawParams& r);

// First-order expansions of omega1 for small and large vol-of-vol.
double omega1_small_vvol_approx(const HestonParams& p);
double omega1_large_vvol_approx(const HestonParams& p);

struct SmileDiagnostics {
    double atm_variance = 0.0;
    double min_location = 0.0;
    double left_slope = 0.0;
    double right_slope = 0.0;
    double orientation = 0.0;
};

SmileDiagnostics diagnostics(const SVIOmegaParams& s);

}  // namespace hsvi
