#pragma once

#include <string>
#include <vector>

namespace hsvi {

// Heston model parameters. All quantities are annualized.
struct HestonParams {
    double kappa = 0.0;  // mean-reversion speed
    double theta = 0.0;  // long-run variance
    double sigma = 0.0;  // volatility of variance
    double rho = 0.0;    // spot/variance correlation
    double v0 = 0.0;     // initial variance
};

enum class Constraint {
    kappa_positive,
    theta_positive,
    sigma_positive,
    v0_positive,
    rho_interior,
    feller,
    large_correlation,
};

const char* constraint_name(Constraint c);

struct ValidationReport {
    std::vector<Constraint> violations;

    bool ok() const { return violations.empty(); }
    bool violates(Constraint c) const;
    // Positivity and |rho| < 1 hold. The Fourier pricer only needs these;
    // Feller and the large correlation regime are tolerated there.
    bool ok_for_pricing() const;
    std::string describe() const;
};

// Checks every standing assumption and lists the ones that fail. Throws
// MalformedInputError on non-finite fields, never on a violated constraint.
ValidationReport validate_heston(const HestonParams& p);

// Throws ValidationError unless all constraints hold (asymptotic modules).
void require_asymptotic(const HestonParams& p);
// Throws ValidationError unless the pricing constraints hold.
void require_pricing(const HestonParams& p);

struct DerivedConstants {
    double eta = 0.0;        // sqrt(4k^2 + s^2 - 4k rho s)
    double rho_bar = 0.0;    // sqrt(1 - rho^2)
    double theta_bar = 0.0;  // k theta / (k - rho s)
    double p_minus = 0.0;
    double p_plus = 0.0;
};

DerivedConstants derive_constants(const HestonParams& p);

// Three-parameter SVI variance curve in scaled log-moneyness x = k/T.
struct SVIOmegaParams {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double rho = 0.0;
};

// Classic five-parameter SVI in log-strike k at maturity T.
struct SVIRawParams {
    double a = 0.0;
    double b = 0.0;
    double rho_tilde = 0.0;
    double m = 0.0;
    double sigma_tilde = 0.0;
    double T = 0.0;
};

void require_valid(const SVIOmegaParams& s);
void require_valid(const SVIRawParams& r);

SVIOmegaParams heston_to_svi_omega(const HestonParams& p);
SVIRawParams svi_omega_to_raw(const SVIOmegaParams& s, double T);

struct OmegaConversion {
    SVIOmegaParams omega;
    // (b - omega1*omega2/(2T)) / (omega1*omega2/(2T)); zero for a raw curve
    // that came from a Heston-consistent omega curve.
    double residual = 0.0;
};

// Inverts the omega -> raw map without enforcing consistency.
OmegaConversion svi_raw_to_omega_unchecked(const SVIRawParams& r);

inline constexpr double kConsistencyTolerance = 1e-9;

// Inverts the omega -> raw map. Throws ConsistencyError if b does not match
// omega1*omega2/(2T) within kConsistencyTolerance (relative).
SVIOmegaParams svi_raw_to_omega(const SVIRawParams& r);

}  // namespace hsvi
