#include "hsvi/saddle.hpp"

#include <cmath>

#include "hsvi/svi_surface.hpp"

namespace hsvi {

SaddleContext::SaddleContext(const HestonParams& p) : pipeline_(p) {
    fd_step_ = 1e-6 * (constants().p_plus - constants().p_minus);
}

cplx SaddleContext::v_complex(cplx p) const {
    const auto& hp = params();
    const cplx q = hp.kappa - hp.rho * hp.sigma * p;
    const cplx d = std::sqrt(q * q + hp.sigma * hp.sigma * p * (1.0 - p));
    const double kt = hp.kappa * hp.theta;
    if (q.real() >= 0) {
        // q + d has positive real part here; q - d = -sigma^2 p (1-p) / (q + d)
        return -kt * p * (1.0 - p) / (q + d);
    }
    return kt / (hp.sigma * hp.sigma) * (q - d);
}

cplx SaddleContext::psi(cplx u) const {
    return -v_complex(0.5 + cplx(0, 1) * u);
}

cplx SaddleContext::psi_prime(cplx u) const {
    // fourth-order central stencil
    const double h = fd_step_;
    return (8.0 * (psi(u + h) - psi(u - h)) - (psi(u + 2 * h) - psi(u - 2 * h))) / (12 * h);
}

cplx SaddleContext::u_tilde(double x) const {
    return cplx(0, -(pipeline_.p_star(x) - 0.5));
}

SaddleResidual saddle_residual(const SaddleContext& ctx, double x) {
    const SVIOmegaParams svi = heston_to_svi_omega(ctx.params());
    SaddleResidual r;
    r.x = x;
    r.svi_variance = svi_omega_variance(svi, x);
    const double v = r.svi_variance;
    r.lhs = v / 8 + x * x / (2 * v);
    const cplx u = ctx.u_tilde(x);
    r.rhs = ctx.psi(u) + cplx(0, 1) * x * u;
    r.abs_residual = std::abs(r.lhs - r.rhs);
    r.rel_residual = r.abs_residual / std::abs(r.lhs);
    r.saddle_equation_residual = std::abs(ctx.psi_prime(u) + cplx(0, x));
    return r;
}

}  // namespace hsvi
