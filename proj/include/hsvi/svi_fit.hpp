#pragma once

#include <optional>
#include <vector>

#include "hsvi/model_params.hpp"
#include "hsvi/smile.hpp"
#include "hsvi/svi_surface.hpp"

namespace hsvi {

struct FitOptions {
    unsigned max_iterations = 500;
    // Stop when ||J^T r||_inf <= gradient_tolerance * (1 + objective).
    double gradient_tolerance = 1e-10;
};

struct FitInterpretation {
    double orientation = 0.0;      // rho_tilde, read as the Heston correlation
    SVIOmegaParams omega;          // raw -> omega conversion (not validated)
    SmileDiagnostics diagnostics;  // omega-form diagnostics, x units
    double min_location_k = 0.0;   // argmin of the raw variance in k
    WingSlopes raw_slopes;         // b(1 +- rho_tilde), variance per unit k
    double atm_variance = 0.0;     // raw variance at k = 0
    double consistency_residual = 0.0;
};

struct FitResult {
    SVIRawParams params;
    double objective = 0.0;  // RMS error in total variance
    unsigned iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;  // ||J^T r||_inf in the transformed coordinates
    // Objective after every accepted step of the winning start, starting with
    // the initial guess.
    std::vector<double> objective_history;
    std::optional<FitInterpretation> interpretation;
};

// Least-squares fit of raw SVI total variance to the smile. Runs the
// optional initial guess first, then 8 deterministic starts; the lowest
// objective wins with ties going to the earlier start.
// Throws UnderdeterminedError for fewer than 5 points.
FitResult fit_svi(const Smile& smile, const std::optional<SVIRawParams>& initial = std::nullopt,
                  const FitOptions& options = {});

// Reads the fitted parameters in Heston terms. Throws ValidationError for a
// fit that did not converge.
FitInterpretation interpret_fit(const FitResult& r);
// Same reading for an arbitrary raw parameter set.
FitInterpretation interpret_raw(const SVIRawParams& r);

}  // namespace hsvi
