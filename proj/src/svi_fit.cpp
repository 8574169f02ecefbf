#include "hsvi/svi_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hsvi/errors.hpp"
#include "hsvi/parallel.hpp"

namespace hsvi {

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// Unconstrained coordinates: (a, log b, atanh rho, m, log sigma).
struct Transformed {
    static SVIRawParams to_raw(const Vec5& t, double T) {
        return {t[0], std::exp(t[1]), std::tanh(t[2]), t[3], std::exp(t[4]), T};
    }
    static Vec5 from_raw(const SVIRawParams& r) {
        Vec5 t;
        t << r.a, std::log(r.b), std::atanh(r.rho_tilde), r.m, std::log(r.sigma_tilde);
        return t;
    }
};

struct Problem {
    std::vector<double> k;
    std::vector<double> w;  // observed total variance
    double T = 0.0;

    double cost(const Vec5& t, Eigen::VectorXd& r) const {
        const auto p = Transformed::to_raw(t, T);
        r.resize(static_cast<Eigen::Index>(k.size()));
        for (std::size_t i = 0; i < k.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = svi_raw_total_variance(p, k[i]) - w[i];
        }
        return 0.5 * r.squaredNorm();
    }

    Eigen::Matrix<double, Eigen::Dynamic, 5> jacobian(const Vec5& t) const {
        const auto p = Transformed::to_raw(t, T);
        Eigen::Matrix<double, Eigen::Dynamic, 5> J(static_cast<Eigen::Index>(k.size()), 5);
        for (std::size_t i = 0; i < k.size(); ++i) {
            const double y = k[i] - p.m;
            const double root = std::hypot(y, p.sigma_tilde);
            const auto row = static_cast<Eigen::Index>(i);
            J(row, 0) = T;
            J(row, 1) = T * p.b * (p.rho_tilde * y + root);
            J(row, 2) = T * p.b * y * (1 - p.rho_tilde * p.rho_tilde);
            J(row, 3) = T * p.b * (-p.rho_tilde - y / root);
            J(row, 4) = T * p.b * p.sigma_tilde * p.sigma_tilde / root;
        }
        return J;
    }

    double rmse(double cost) const { return std::sqrt(2 * cost / static_cast<double>(k.size())); }
};

FitResult levenberg_marquardt(const Problem& prob, const SVIRawParams& start,
                              const FitOptions& opt) {
    Vec5 t = Transformed::from_raw(start);
    Eigen::VectorXd r, r_trial;
    double f = prob.cost(t, r);

    FitResult out;
    out.objective_history.push_back(prob.rmse(f));
    double mu = 1e-3;
    double nu = 2.0;
    unsigned it = 0;
    double gnorm = 0.0;
    for (; it < opt.max_iterations; ++it) {
        const auto J = prob.jacobian(t);
        const Vec5 g = J.transpose() * r;
        gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= opt.gradient_tolerance * (1 + prob.rmse(f))) break;

        const Mat5 H = J.transpose() * J;
        bool accepted = false;
        while (!accepted && mu < 1e30) {
            Mat5 A = H;
            for (int j = 0; j < 5; ++j) A(j, j) += mu * std::max(H(j, j), 1e-300);
            const Vec5 step = A.ldlt().solve(-g);
            if (!step.allFinite()) {
                mu *= nu;
                nu *= 2;
                continue;
            }
            const Vec5 trial = t + step;
            const double f_trial = prob.cost(trial, r_trial);
            // predicted decrease of the quadratic model
            const double predicted = -(g.dot(step) + 0.5 * step.dot(H * step));
            if (std::isfinite(f_trial) && f_trial < f) {
                const double gain = predicted > 0 ? (f - f_trial) / predicted : 0.0;
                t = trial;
                std::swap(r, r_trial);
                f = f_trial;
                out.objective_history.push_back(prob.rmse(f));
                mu *= std::max(1.0 / 3.0, 1 - std::pow(2 * gain - 1, 3));
                nu = 2.0;
                accepted = true;
            } else {
                mu *= nu;
                nu *= 2;
            }
        }
        if (!accepted) break;  // no decrease possible at working precision
    }
    {
        const auto J = prob.jacobian(t);
        gnorm = (J.transpose() * r).lpNorm<Eigen::Infinity>();
    }
    out.params = Transformed::to_raw(t, prob.T);
    out.objective = prob.rmse(f);
    out.iterations = it;
    out.gradient_norm = gnorm;
    out.converged = gnorm <= opt.gradient_tolerance * (1 + out.objective);
    return out;
}

// Given (rho, m, sigma), SVI is linear in (a, b): solve for them directly.
SVIRawParams seed(const Problem& prob, double rho, double m, double sig) {
    const std::size_t n = prob.k.size();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double d = prob.k[i] - m;
        const auto row = static_cast<Eigen::Index>(i);
        A(row, 0) = 1.0;
        A(row, 1) = rho * d + std::hypot(d, sig);
        y[row] = prob.w[i] / prob.T;
    }
    const Eigen::Vector2d ab = A.colPivHouseholderQr().solve(y);
    const double mean_var = y.mean();
    double b = ab[1];
    if (!(b > 1e-8)) b = std::max(1e-3 * std::abs(mean_var), 1e-8);
    double a = ab[0];
    if (!std::isfinite(a)) a = mean_var;
    return {a, b, rho, m, sig, prob.T};
}

}  // namespace

FitResult fit_svi(const Smile& smile, const std::optional<SVIRawParams>& initial,
                  const FitOptions& options) {
    if (smile.size() < 5)
        throw UnderdeterminedError("SVI fit needs at least 5 smile points, got " +
                                   std::to_string(smile.size()));
    Problem prob;
    prob.T = smile.maturity();
    for (const auto& pt : smile.points()) {
        prob.k.push_back(pt.k);
        prob.w.push_back(prob.T * pt.vol * pt.vol);
    }

    std::vector<SVIRawParams> starts;
    if (initial) {
        require_valid(*initial);
        if (initial->T != prob.T) throw MalformedInputError("initial guess maturity differs from smile");
        auto guess = *initial;
        if (guess.b <= 0) guess.b = 1e-8;
        starts.push_back(guess);
    }
    const double k_lo = prob.k.front(), k_hi = prob.k.back();
    const double k_mid = 0.5 * (k_lo + k_hi);
    const double sig0 = std::max(0.25 * (k_hi - k_lo), 1e-3);
    for (double rho : {-0.7, 0.7}) {
        for (double m : {k_lo, k_mid, k_hi}) starts.push_back(seed(prob, rho, m, sig0));
    }
    starts.push_back(seed(prob, 0.0, k_mid, sig0));
    starts.push_back(seed(prob, 0.0, k_mid, 0.25 * sig0));

    std::vector<FitResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        results[i] = levenberg_marquardt(prob, starts[i], options);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].objective < results[best].objective) best = i;
    }
    FitResult out = std::move(results[best]);
    if (out.converged) out.interpretation = interpret_raw(out.params);
    return out;
}

FitInterpretation interpret_raw(const SVIRawParams& r) {
    auto conv = svi_raw_to_omega_unchecked(r);
    FitInterpretation out;
    out.orientation = r.rho_tilde;
    out.omega = conv.omega;
    auto slopes = wing_slopes(conv.omega);
    out.diagnostics = {conv.omega.omega1, smile_minimum(conv.omega), slopes.left, slopes.right,
                       conv.omega.rho};
    const double rb = std::sqrt((1 - r.rho_tilde) * (1 + r.rho_tilde));
    out.min_location_k = r.m - r.rho_tilde * r.sigma_tilde / rb;
    out.raw_slopes = raw_wing_slopes(r);
    out.atm_variance = svi_raw_total_variance(r, 0.0) / r.T;
    out.consistency_residual = conv.residual;
    return out;
}

FitInterpretation interpret_fit(const FitResult& r) {
    if (!r.converged) {
        throw ValidationError("refusing to interpret a fit that did not converge (gradient norm " +
                              std::to_string(r.gradient_norm) + ")");
    }
    return interpret_raw(r.params);
}

}  // namespace hsvi
