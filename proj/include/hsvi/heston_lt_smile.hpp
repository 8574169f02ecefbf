#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hsvi/model_params.hpp"

namespace hsvi {

/// Evaluation context for the large-maturity Heston smile.
///
/// Holds the parameters together with their derived constants and exposes
/// two independent routes to the limiting implied variance: the Legendre
/// pipeline built on V, d, p* and V*, and the simplified closed form in
/// terms of Delta(x). Construction rejects any parameter set outside the
/// regime where the limit is known, in particular kappa - rho*sigma <= 0.
///
/// Only kappa, theta, sigma and rho enter; v0 plays no role in the limit.
class AsymptoticPipeline {
public:
    explicit AsymptoticPipeline(const HestonParams& p);

    const HestonParams& params() const { return params_; }
    const DerivedConstants& constants() const { return constants_; }

    /// sqrt((kappa - rho sigma p)^2 + sigma^2 p (1 - p)) on [p-, p+].
    /// Throws DomainError outside the closed interval.
    double d_of_p(double p) const;
    /// Limiting cumulant V(p) = kappa theta / sigma^2 (kappa - rho sigma p - d(p)).
    double v_of_p(double p) const;
    /// Maximiser of p x - V(p); strictly inside (p-, p+) and increasing in x.
    double p_star(double x) const;
    /// Legendre transform V*(x) = p*(x) x - V(p*(x)).
    double v_star(double x) const;
    /// V*(x) through (A(x) + Delta(x) eta) / (2 sigma^2 rho_bar^2).
    double v_star_closed(double x) const;
    double delta_of_x(double x) const;
    /// Phi(x) = V*(x)^2 - x V*(x), from the Legendre transform.
    double phi_of_x(double x) const;
    /// Phi(x) through (eta (kappa theta + x rho sigma) - (2 kappa - rho sigma) Delta)^2
    /// / (4 sigma^4 rho_bar^4).
    double phi_closed(double x) const;

    /// sigma^2 rho_bar^2 (kappa theta + x rho sigma)^2
    ///   - x^2 sigma^2 rho_bar^2 (2 kappa - rho sigma)^2.
    /// Its sign is the sign of the square root taken in the pipeline.
    double sign_polynomial(double x) const;
    /// (-theta/2, theta_bar/2), the roots of sign_polynomial.
    std::pair<double, double> sign_polynomial_roots() const;

    /// Limiting implied variance through V* with the indicator on
    /// (-theta/2, theta_bar/2) choosing the sign of the square root.
    double asymptotic_variance_pipeline(double x) const;
    /// Same variance via 2/(sigma^2 rho_bar^2) (eta - (2k - rho s)) (k theta + rho s x + Delta(x)).
    double asymptotic_variance_closed(double x) const;

    /// Pipeline evaluation with an explicit choice of sign for the square
    /// root, ignoring the indicator. Used to probe the boundary behaviour.
    double asymptotic_variance_branch(double x, bool plus) const;

private:
    // V*(x) and V*(x) - x, each evaluated without cancellation.
    std::pair<double, double> v_star_pair(double x) const;

    HestonParams params_;
    DerivedConstants constants_;
    double kt_;      // kappa theta
    double srb2_;    // sigma^2 rho_bar^2
    double c_;       // 2 kappa - rho sigma
};

struct EquivalencePoint {
    double x = 0.0;
    double pipeline = 0.0;
    double closed = 0.0;
    double svi = 0.0;
    double max_rel_deviation = 0.0;
};

struct EquivalenceReport {
    std::vector<EquivalencePoint> points;
    double max_abs_deviation = 0.0;
    double max_rel_deviation = 0.0;
    double worst_x = 0.0;
    bool pass = false;
};

inline constexpr double kEquivalenceTolerance = 1e-10;

/// Compares pipeline, closed form and omega-form SVI under the Heston
/// change of variables on every grid point.
EquivalenceReport verify_equivalence(const AsymptoticPipeline& ctx, std::span<const double> grid,
                                     double tolerance = kEquivalenceTolerance);

}  // namespace hsvi
