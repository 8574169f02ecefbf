#pragma once

#include <complex>

#include "hsvi/heston_lt_smile.hpp"
#include "hsvi/model_params.hpp"

namespace hsvi {

using cplx = std::complex<double>;

// Complex continuation of the limiting cumulant and the saddle point of the
// Fourier pricing integral in the large-maturity limit.
class SaddleContext {
public:
    explicit SaddleContext(const HestonParams& p);

    const HestonParams& params() const { return pipeline_.params(); }
    const DerivedConstants& constants() const { return pipeline_.constants(); }
    const AsymptoticPipeline& pipeline() const { return pipeline_; }

    // V(p) with d(p) on the principal branch of the complex square root.
    cplx v_complex(cplx p) const;
    // Limiting exponent: phi_T(u - i/2) ~ exp(-psi(u) T), psi(u) = -V(1/2 + iu).
    cplx psi(cplx u) const;
    // Central-difference derivative of psi.
    cplx psi_prime(cplx u) const;
    // Saddle point: -i (p*(x) - 1/2), purely imaginary.
    cplx u_tilde(double x) const;

private:
    AsymptoticPipeline pipeline_;
    double fd_step_;
};

struct SaddleResidual {
    double x = 0.0;
    double svi_variance = 0.0;
    double lhs = 0.0;      // v/8 + x^2/(2v)
    cplx rhs;              // psi(u~) + i x u~
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double saddle_equation_residual = 0.0;  // |psi'(u~) + i x|
};

// Residual of the exponent-matching condition with v the SVI variance under
// the Heston change of variables.
SaddleResidual saddle_residual(const SaddleContext& ctx, double x);

}  // namespace hsvi
