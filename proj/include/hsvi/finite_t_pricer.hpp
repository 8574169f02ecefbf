#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsvi/model_params.hpp"
#include "hsvi/smile.hpp"

namespace hsvi {

// Units throughout: spot = forward = 1, zero rates and dividends. Prices are
// in units of spot and k = log(K/F).

// Largest maturity for which E[S_T^p] is finite (infinity if it always is).
double moment_explosion_time(const HestonParams& p, double moment);

// Characteristic function E[exp(i z log S_T)] of the log-price. Uses the
// continuous-branch formulation. Throws DomainError when the moment
// -Im(z) does not exist at maturity T.
std::complex<double> heston_cf(const HestonParams& p, std::complex<double> z, double T);

struct QuadratureConfig {
    // Upper limit of the u-integral; chosen from the integrand envelope when
    // empty.
    std::optional<double> truncation;
    double tolerance = 1e-12;
    // Cap on adaptive interval bisections, expressed as a total interval
    // count.
    unsigned max_subdivisions = 1u << 15;
    // Largest truncation the automatic search may reach.
    double max_truncation = 1e6;
    // Forces the integration line Im(z) = -contour (any value other than 0
    // and 1 whose moment exists). Chosen per strike when empty.
    std::optional<double> contour;
};

void require_valid(const QuadratureConfig& q);

struct FourierPrice {
    double price = 0.0;
    double quadrature_error = 0.0;  // absolute error estimate of the integral
    double truncation_error = 0.0;  // bound on the discarded tail
    double truncation = 0.0;        // U actually used
    double contour = 0.5;           // integration line Im(z) = -contour
};

// Price of the out-of-the-money option: the call for k >= 0, the put for
// k < 0. Far from the money the contour moves next to the saddle point so
// that small prices keep their relative accuracy.
FourierPrice price_otm_fourier(const HestonParams& p, double k, double T,
                               const QuadratureConfig& q = {});

// Normalized call price from the Fourier representation with kernel
// 1/(u^2 + 1/4) and phi_T(u - i/2), integrated over [0, U] and doubled by
// symmetry. Throws AccuracyError when the error budget exceeds the tolerance.
FourierPrice price_call_fourier_detailed(const HestonParams& p, double k, double T,
                                         const QuadratureConfig& q = {});
double price_call_fourier(const HestonParams& p, double k, double T,
                          const QuadratureConfig& q = {});

// Black-Scholes call with unit forward.
double bs_call_price(double vol, double k, double T);
// Out-of-the-money Black-Scholes price: call for k >= 0, put for k < 0.
double bs_otm_price(double vol, double k, double T);
// dC/dvol.
double bs_vega(double vol, double k, double T);

// Inverts bs_call_price. Throws ArbitrageError outside (max(1-e^k,0), 1) and
// BoundaryError on its edges.
double implied_vol(double price, double k, double T);
// Inverts bs_otm_price; the band is (0, min(1, e^k)).
double implied_vol_otm(double otm_price, double k, double T);

struct SmileFailure {
    double x = 0.0;
    double k = 0.0;
    std::string message;
};

struct SmileResult {
    Smile smile;                        // successfully priced points
    std::vector<SmileFailure> failures; // in grid order
};

// Prices calls at k = x T for each x and inverts to implied vols. Points are
// priced concurrently; failures are recorded per point.
SmileResult heston_smile(const HestonParams& p, double T, std::span<const double> x_grid,
                         const QuadratureConfig& q = {});

struct ConvergenceRow {
    double T = 0.0;
    double max_rel_error = 0.0;
    double worst_x = 0.0;
    std::vector<double> rel_errors;  // per x, grid order
};

struct ConvergenceReport {
    std::vector<double> x_grid;
    std::vector<ConvergenceRow> rows;
    bool strictly_decreasing = false;
};

// Relative error |sigma^2_BS(xT, T) - sigma^2_SVI(x)| / sigma^2_SVI(x) per T.
ConvergenceReport convergence_study(const HestonParams& p, std::span<const double> T_list,
                                    std::span<const double> x_grid,
                                    const QuadratureConfig& q = {});

}  // namespace hsvi
