#include "hsvi/finite_t_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "hsvi/errors.hpp"
#include "hsvi/parallel.hpp"
#include "hsvi/svi_surface.hpp"

namespace hsvi {

using cplx = std::complex<double>;

namespace {

constexpr cplx I{0.0, 1.0};

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

void require_maturity(double T) {
    if (!std::isfinite(T) || !(T > 0)) throw DomainError("maturity T must be positive");
}

cplx cf_unchecked(const HestonParams& p, cplx z, double T) {
    const double s2 = p.sigma * p.sigma;
    const cplx alpha = -0.5 * (z * z + I * z);
    const cplx beta = p.kappa - p.rho * p.sigma * I * z;
    const cplx d = std::sqrt(beta * beta - 2.0 * alpha * s2);
    cplx C, D;
    if (std::abs(d) * T < 1e-8) {
        // d -> 0 limit of the expressions below
        D = 2.0 * alpha * T / (2.0 + beta * T);
        C = p.kappa / s2 * (beta * T - 2.0 * std::log(1.0 + 0.5 * beta * T));
    } else {
        const cplx e = std::exp(-d * T);
        const cplx den = (beta + d) - (beta - d) * e;
        D = 2.0 * alpha * (1.0 - e) / den;
        C = p.kappa / s2 * ((beta - d) * T - 2.0 * std::log(den / (2.0 * d)));
    }
    return std::exp(p.theta * C + p.v0 * D);
}

}  // namespace

double moment_explosion_time(const HestonParams& p, double moment) {
    const double chi = p.rho * p.sigma * moment - p.kappa;
    const double disc = chi * chi - p.sigma * p.sigma * moment * (moment - 1);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (disc >= 0) {
        const double r = std::sqrt(disc);
        if (chi < 0 || r >= chi) return inf;
        return std::log((chi + r) / (chi - r)) / r;
    }
    const double r = std::sqrt(-disc);
    const double angle = chi == 0 ? std::numbers::pi / 2 : std::atan(r / chi);
    return 2 / r * ((chi < 0 ? std::numbers::pi : 0.0) + angle);
}

cplx heston_cf(const HestonParams& p, cplx z, double T) {
    require_pricing(p);
    require_maturity(T);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw MalformedInputError("characteristic function argument must be finite");
    const double moment = -z.imag();
    if (moment < 0 || moment > 1) {
        const double t_star = moment_explosion_time(p, moment);
        if (!(T < t_star)) {
            std::ostringstream os;
            os << "moment " << moment << " explodes at T* = " << t_star << " <= T = " << T;
            throw DomainError(os.str());
        }
    }
    return cf_unchecked(p, z, T);
}

void require_valid(const QuadratureConfig& q) {
    if (q.truncation && !(std::isfinite(*q.truncation) && *q.truncation > 0))
        throw MalformedInputError("quadrature truncation must be positive");
    if (!(q.tolerance > 0) || !std::isfinite(q.tolerance))
        throw MalformedInputError("quadrature tolerance must be positive");
    if (q.max_subdivisions < 1) throw MalformedInputError("max_subdivisions must be >= 1");
    if (!(q.max_truncation > 0)) throw MalformedInputError("max_truncation must be positive");
    if (q.contour && (!std::isfinite(*q.contour) || *q.contour == 0 || *q.contour == 1))
        throw MalformedInputError("integration contour must avoid the poles at 0 and 1");
}

namespace {

// Mean of the integrated variance, a Black-Scholes proxy for the smile level.
double expected_total_variance(const HestonParams& p, double T) {
    const double decay = p.kappa * T < 1e-8 ? T : -std::expm1(-p.kappa * T) / p.kappa;
    return p.theta * T + (p.v0 - p.theta) * decay;
}

// Picks the contour Im(z) = -nu. nu = 1/2 is the symmetric kernel; deep
// out-of-the-money strikes move the contour past the pole at nu = 1 (calls)
// or nu = 0 (puts), next to the Black-Scholes saddle 1/2 + k/w, so the
// integral returns the small OTM price itself instead of a difference of
// O(1) terms.
double choose_contour(const HestonParams& p, double k, double T) {
    const double w = expected_total_variance(p, T);
    const double saddle = 0.5 + k / w;
    auto moment_ok = [&](double nu) { return moment_explosion_time(p, nu) >= 2 * T; };
    if (saddle > 1) {
        double nu = std::max(saddle, 1.5);
        for (int i = 0; i < 60 && !moment_ok(nu); ++i) nu = 1 + 0.5 * (nu - 1);
        return nu >= 1.25 && moment_ok(nu) ? nu : 0.5;
    }
    if (saddle < 0) {
        double nu = std::min(saddle, -0.5);
        for (int i = 0; i < 60 && !moment_ok(nu); ++i) nu *= 0.5;
        return nu <= -0.25 && moment_ok(nu) ? nu : 0.5;
    }
    return 0.5;
}

}  // namespace

FourierPrice price_otm_fourier(const HestonParams& p, double k, double T,
                               const QuadratureConfig& q) {
    require_pricing(p);
    require_maturity(T);
    require_valid(q);
    if (!std::isfinite(k)) throw MalformedInputError("log-moneyness must be finite");

    const double nu = q.contour ? *q.contour : choose_contour(p, k, T);
    if (q.contour && !(moment_explosion_time(p, nu) > T))
        throw DomainError("moment " + std::to_string(nu) + " does not exist at this maturity");
    const bool symmetric = nu > 0 && nu < 1;
    // With a = -nu - iu the integral
    //   J = 1/pi * int_0^inf Re[e^{(1 - nu - iu)k} phi(u - i nu) / (a (a + 1))] du
    // is the call for nu > 1, the call minus the forward for 0 < nu < 1 and
    // the put for nu < 0 (residues at the poles nu = 1 and nu = 0). At
    // nu = 1/2 the kernel is -e^{k/2} e^{-iuk} phi(u - i/2) / (u^2 + 1/4).
    const double scale = std::exp((1 - nu) * k) / std::numbers::pi;
    auto integrand = [&](double u) {
        const cplx phi = cf_unchecked(p, cplx(u, -nu), T);
        if (nu == 0.5) return -(std::exp(-I * (u * k)) * phi).real() / (u * u + 0.25);
        const cplx a(-nu, -u);
        return (std::exp(-I * (u * k)) * phi / (a * (a + 1.0))).real();
    };
    // |integrand| <= |phi(u - i nu)| / u^2 for u >= 1, so the tail beyond U is
    // at most scale * |phi(U - i nu)| / U.
    auto tail_bound = [&](double u) {
        return scale * std::abs(cf_unchecked(p, cplx(u, -nu), T)) / u;
    };

    FourierPrice out;
    out.contour = nu;
    if (q.truncation) {
        out.truncation = *q.truncation;
    } else {
        // Relative to the integrand level at u = 0 so that tiny OTM prices
        // keep their relative accuracy.
        const double level = std::min(1.0, scale * std::abs(cf_unchecked(p, cplx(0, -nu), T)));
        double u = 8.0;
        while (tail_bound(u) > 0.1 * q.tolerance * level && u < q.max_truncation) u *= 2;
        out.truncation = std::min(u, q.max_truncation);
    }
    out.truncation_error = tail_bound(out.truncation);

    const auto depth = static_cast<unsigned>(std::floor(std::log2(q.max_subdivisions)));
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, out.truncation, depth, 0.1 * q.tolerance, &err);
    out.quadrature_error = scale * err;
    const double j = scale * integral;
    if (symmetric) {
        const double call = 1.0 + j;
        out.price = k >= 0 ? call : call - 1 + std::exp(k);
    } else if (nu > 1) {
        out.price = k >= 0 ? j : j - 1 + std::exp(k);  // call -> put by parity
    } else {
        out.price = k < 0 ? j : j + 1 - std::exp(k);   // put -> call by parity
    }

    const bool auto_truncation = !q.truncation.has_value();
    const double budget = out.quadrature_error + (auto_truncation ? out.truncation_error : 0.0);
    if (!(budget <= q.tolerance) || !std::isfinite(out.price)) {
        std::ostringstream os;
        os << "Fourier price at k = " << k << ", T = " << T << " misses tolerance "
           << q.tolerance << " (quadrature error " << out.quadrature_error
           << ", truncation bound " << out.truncation_error << " at U = " << out.truncation
           << ")";
        throw AccuracyError(os.str(), out.price, budget);
    }
    return out;
}

FourierPrice price_call_fourier_detailed(const HestonParams& p, double k, double T,
                                         const QuadratureConfig& q) {
    FourierPrice out = price_otm_fourier(p, k, T, q);
    if (k < 0) out.price += 1 - std::exp(k);
    return out;
}

double price_call_fourier(const HestonParams& p, double k, double T, const QuadratureConfig& q) {
    return price_call_fourier_detailed(p, k, T, q).price;
}

namespace {

// OTM price as a function of total standard deviation s > 0.
double otm_price_at(double s, double k) {
    const double d1 = -k / s + 0.5 * s;
    const double d2 = d1 - s;
    if (k >= 0) return norm_cdf(d1) - std::exp(k) * norm_cdf(d2);
    return std::exp(k) * norm_cdf(-d2) - norm_cdf(-d1);
}

}  // namespace

double bs_otm_price(double vol, double k, double T) {
    if (!(vol >= 0) || !std::isfinite(k)) throw MalformedInputError("invalid Black-Scholes input");
    require_maturity(T);
    const double upper = std::min(1.0, std::exp(k));
    if (std::isinf(vol)) return upper;
    const double s = vol * std::sqrt(T);
    if (s == 0) return 0.0;
    return std::clamp(otm_price_at(s, k), 0.0, upper);
}

double bs_call_price(double vol, double k, double T) {
    const double otm = bs_otm_price(vol, k, T);
    if (k >= 0) return otm;
    return std::clamp(otm + 1 - std::exp(k), 1 - std::exp(k), 1.0);
}

double bs_vega(double vol, double k, double T) {
    require_maturity(T);
    const double s = vol * std::sqrt(T);
    if (!(s > 0)) return 0.0;
    return norm_pdf(-k / s + 0.5 * s) * std::sqrt(T);
}

double implied_vol_otm(double price, double k, double T) {
    require_maturity(T);
    if (!std::isfinite(price) || !std::isfinite(k))
        throw MalformedInputError("implied vol needs finite price and log-moneyness");
    const double upper = std::min(1.0, std::exp(k));
    if (price > upper || price < 0) {
        std::ostringstream os;
        os << "option price " << price << " outside the no-arbitrage band (0, " << upper
           << ") at k = " << k;
        throw ArbitrageError(os.str());
    }
    if (price == upper || price == 0) {
        std::ostringstream os;
        os << "option price " << price << " sits on the no-arbitrage boundary at k = " << k;
        throw BoundaryError(os.str());
    }

    // Solve in total standard deviation s = vol sqrt(T); the price is increasing in s.
    double hi = 1.0;
    while (otm_price_at(hi, k) < price && hi < 1e3) hi *= 2;
    double guess = std::max(std::sqrt(2 * std::abs(k)), std::sqrt(2 * std::numbers::pi) * price);
    guess = std::clamp(guess, 1e-8, hi);

    auto f = [&](double s) {
        if (s <= 0) return std::make_pair(-price, 0.0);
        return std::make_pair(otm_price_at(s, k) - price, norm_pdf(-k / s + 0.5 * s));
    };
    std::uintmax_t max_iter = 200;
    const double s = boost::math::tools::newton_raphson_iterate(
        f, guess, 0.0, hi, std::numeric_limits<double>::digits - 2, max_iter);
    const double miss = std::abs(otm_price_at(s, k) - price);
    if (miss > 1e-12) {
        throw AccuracyError("implied vol inversion did not reach 1e-12 in price",
                            s / std::sqrt(T), miss);
    }
    return s / std::sqrt(T);
}

double implied_vol(double price, double k, double T) {
    require_maturity(T);
    if (!std::isfinite(price) || !std::isfinite(k))
        throw MalformedInputError("implied vol needs finite price and log-moneyness");
    const double intrinsic = std::max(1 - std::exp(k), 0.0);
    if (price > 1 || price < intrinsic) {
        std::ostringstream os;
        os << "call price " << price << " outside the no-arbitrage band (" << intrinsic
           << ", 1) at k = " << k;
        throw ArbitrageError(os.str());
    }
    if (price == 1 || price == intrinsic) {
        std::ostringstream os;
        os << "call price " << price << " sits on the no-arbitrage boundary at k = " << k;
        throw BoundaryError(os.str());
    }
    // put-call parity with unit forward
    return implied_vol_otm(k >= 0 ? price : price - intrinsic, k, T);
}

SmileResult heston_smile(const HestonParams& p, double T, std::span<const double> x_grid,
                         const QuadratureConfig& q) {
    require_pricing(p);
    require_maturity(T);
    require_valid(q);
    for (double x : x_grid) {
        if (!std::isfinite(x)) throw MalformedInputError("smile grid must be finite");
    }
    struct Slot {
        double vol = 0.0;
        std::string error;
    };
    std::vector<Slot> slots(x_grid.size());
    parallel_for(x_grid.size(), [&](std::size_t i) {
        const double k = x_grid[i] * T;
        try {
            slots[i].vol = implied_vol_otm(price_otm_fourier(p, k, T, q).price, k, T);
        } catch (const Error& e) {
            slots[i].error = e.what();
        }
    });
    SmileResult out;
    std::vector<SmilePoint> points;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double k = x_grid[i] * T;
        if (slots[i].error.empty()) {
            points.push_back({k, slots[i].vol});
        } else {
            out.failures.push_back({x_grid[i], k, slots[i].error});
        }
    }
    out.smile = Smile(T, std::move(points), SmileSource::priced);
    return out;
}

ConvergenceReport convergence_study(const HestonParams& p, std::span<const double> T_list,
                                    std::span<const double> x_grid, const QuadratureConfig& q) {
    if (T_list.empty() || x_grid.empty())
        throw MalformedInputError("convergence study needs maturities and a grid");
    for (std::size_t i = 1; i < T_list.size(); ++i) {
        if (!(T_list[i] > T_list[i - 1]))
            throw MalformedInputError("maturities must be strictly increasing");
    }
    const SVIOmegaParams svi = heston_to_svi_omega(p);
    ConvergenceReport report;
    report.x_grid.assign(x_grid.begin(), x_grid.end());
    for (double T : T_list) {
        auto result = heston_smile(p, T, x_grid, q);
        if (!result.failures.empty()) {
            const auto& f = result.failures.front();
            throw AccuracyError("pricing failed at x = " + std::to_string(f.x) + ": " + f.message,
                                std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN());
        }
        ConvergenceRow row;
        row.T = T;
        // smile points are sorted by k = xT, i.e. by x since T > 0
        std::vector<double> xs(x_grid.begin(), x_grid.end());
        std::vector<std::size_t> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
        row.rel_errors.assign(xs.size(), 0.0);
        for (std::size_t j = 0; j < order.size(); ++j) {
            const std::size_t i = order[j];
            const double vol = result.smile.points()[j].vol;
            const double target = svi_omega_variance(svi, xs[i]);
            const double err = std::abs(vol * vol - target) / target;
            row.rel_errors[i] = err;
            if (err > row.max_rel_error) {
                row.max_rel_error = err;
                row.worst_x = xs[i];
            }
        }
        report.rows.push_back(std::move(row));
    }
    report.strictly_decreasing = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (!(report.rows[i].max_rel_error < report.rows[i - 1].max_rel_error))
            report.strictly_decreasing = false;
    }
    return report;
}

}  // namespace hsvi
