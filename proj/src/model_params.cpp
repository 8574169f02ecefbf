#include "hsvi/model_params.hpp"

#include <cmath>
#include <sstream>

#include "hsvi/errors.hpp"

namespace hsvi {

const char* constraint_name(Constraint c) {
    switch (c) {
        case Constraint::kappa_positive: return "kappa > 0";
        case Constraint::theta_positive: return "theta > 0";
        case Constraint::sigma_positive: return "sigma > 0";
        case Constraint::v0_positive: return "v0 > 0";
        case Constraint::rho_interior: return "-1 < rho < 1";
        case Constraint::feller: return "Feller condition (2 kappa theta >= sigma^2)";
        case Constraint::large_correlation:
            return "large correlation regime (kappa - rho sigma <= 0)";
    }
    return "unknown constraint";
}

bool ValidationReport::violates(Constraint c) const {
    for (auto v : violations) {
        if (v == c) return true;
    }
    return false;
}

bool ValidationReport::ok_for_pricing() const {
    for (auto v : violations) {
        if (v != Constraint::feller && v != Constraint::large_correlation) return false;
    }
    return true;
}

std::string ValidationReport::describe() const {
    if (ok()) return "all constraints hold";
    std::ostringstream os;
    os << "violated: ";
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << constraint_name(violations[i]);
    }
    return os.str();
}

ValidationReport validate_heston(const HestonParams& p) {
    for (double v : {p.kappa, p.theta, p.sigma, p.rho, p.v0}) {
        if (!std::isfinite(v)) throw MalformedInputError("Heston parameters must be finite");
    }
    ValidationReport r;
    if (!(p.kappa > 0)) r.violations.push_back(Constraint::kappa_positive);
    if (!(p.theta > 0)) r.violations.push_back(Constraint::theta_positive);
    if (!(p.sigma > 0)) r.violations.push_back(Constraint::sigma_positive);
    if (!(p.v0 > 0)) r.violations.push_back(Constraint::v0_positive);
    if (!(p.rho > -1 && p.rho < 1)) r.violations.push_back(Constraint::rho_interior);
    if (2 * p.kappa * p.theta < p.sigma * p.sigma) r.violations.push_back(Constraint::feller);
    if (!(p.kappa - p.rho * p.sigma > 0)) r.violations.push_back(Constraint::large_correlation);
    return r;
}

void require_asymptotic(const HestonParams& p) {
    auto r = validate_heston(p);
    if (!r.ok()) throw ValidationError("invalid Heston parameters: " + r.describe());
}

void require_pricing(const HestonParams& p) {
    auto r = validate_heston(p);
    if (!r.ok_for_pricing()) throw ValidationError("invalid Heston parameters: " + r.describe());
}

DerivedConstants derive_constants(const HestonParams& p) {
    require_asymptotic(p);
    const double k = p.kappa, s = p.sigma, rho = p.rho;
    DerivedConstants c;
    c.eta = std::sqrt(4 * k * k + s * s - 4 * k * rho * s);
    const double rb2 = (1 - rho) * (1 + rho);
    c.rho_bar = std::sqrt(rb2);
    c.theta_bar = k * p.theta / (k - rho * s);
    c.p_minus = (-2 * k * rho + s - c.eta) / (2 * s * rb2);
    c.p_plus = (-2 * k * rho + s + c.eta) / (2 * s * rb2);
    return c;
}

void require_valid(const SVIOmegaParams& s) {
    if (!std::isfinite(s.omega1) || !std::isfinite(s.omega2) || !std::isfinite(s.rho))
        throw MalformedInputError("SVI parameters must be finite");
    if (!(s.omega1 > 0) || !(s.omega2 > 0))
        throw ValidationError("SVI omega1 and omega2 must be positive");
    if (!(s.rho > -1 && s.rho < 1)) throw ValidationError("SVI rho must lie in (-1, 1)");
}

void require_valid(const SVIRawParams& r) {
    for (double v : {r.a, r.b, r.rho_tilde, r.m, r.sigma_tilde, r.T}) {
        if (!std::isfinite(v)) throw MalformedInputError("raw SVI parameters must be finite");
    }
    if (!(r.T > 0)) throw DomainError("maturity T must be positive");
    if (!(r.b >= 0)) throw ValidationError("raw SVI b must be non-negative");
    if (!(r.sigma_tilde > 0)) throw ValidationError("raw SVI sigma_tilde must be positive");
    if (!(r.rho_tilde > -1 && r.rho_tilde < 1))
        throw ValidationError("raw SVI rho_tilde must lie in (-1, 1)");
    const double rb = std::sqrt((1 - r.rho_tilde) * (1 + r.rho_tilde));
    if (r.a + r.b * r.sigma_tilde * rb < 0)
        throw ValidationError("raw SVI variance is negative at its minimum");
}

SVIOmegaParams heston_to_svi_omega(const HestonParams& p) {
    require_asymptotic(p);
    const double k = p.kappa, s = p.sigma, rho = p.rho;
    const double c = 2 * k - rho * s;
    const double eta = std::sqrt(c * c + s * s * (1 - rho) * (1 + rho));
    // eta - c rationalised: (eta - c) = s^2 (1 - rho^2) / (eta + c), c > 0.
    return {4 * k * p.theta / (eta + c), s / (k * p.theta), rho};
}

SVIRawParams svi_omega_to_raw(const SVIOmegaParams& s, double T) {
    require_valid(s);
    if (!std::isfinite(T) || !(T > 0)) throw DomainError("maturity T must be positive");
    const double rb2 = (1 - s.rho) * (1 + s.rho);
    return {
        s.omega1 * rb2 / 2,
        s.omega1 * s.omega2 / (2 * T),
        s.rho,
        -s.rho * T / s.omega2,
        std::sqrt(rb2) * T / s.omega2,
        T,
    };
}

OmegaConversion svi_raw_to_omega_unchecked(const SVIRawParams& r) {
    require_valid(r);
    const double rb2 = (1 - r.rho_tilde) * (1 + r.rho_tilde);
    OmegaConversion out;
    out.omega.rho = r.rho_tilde;
    out.omega.omega2 = std::sqrt(rb2) * r.T / r.sigma_tilde;
    out.omega.omega1 = 2 * r.a / rb2;
    const double b_implied = out.omega.omega1 * out.omega.omega2 / (2 * r.T);
    out.residual = b_implied != 0 ? (r.b - b_implied) / b_implied
                                  : (r.b == 0 ? 0.0 : INFINITY);
    return out;
}

SVIOmegaParams svi_raw_to_omega(const SVIRawParams& r) {
    auto conv = svi_raw_to_omega_unchecked(r);
    if (!(std::abs(conv.residual) <= kConsistencyTolerance)) {
        std::ostringstream os;
        os << "raw SVI parameters are not Heston-consistent: b deviates from "
              "omega1*omega2/(2T) by relative residual "
           << conv.residual;
        throw ConsistencyError(os.str(), conv.residual);
    }
    if (!(conv.omega.omega1 > 0)) {
        throw ConsistencyError("raw SVI parameters give a non-positive omega1 (a <= 0)",
                               conv.residual);
    }
    return conv.omega;
}

}  // namespace hsvi
