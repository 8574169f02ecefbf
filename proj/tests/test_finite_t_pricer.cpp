#include "hsvi/finite_t_pricer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "hsvi/errors.hpp"
#include "hsvi/heston_lt_smile.hpp"
#include "hsvi/sampling.hpp"
#include "hsvi/svi_surface.hpp"
#include "support.hpp"

namespace hsvi {
namespace {

using testing::kP0;
using testing::rel_diff;
using cplx = std::complex<double>;
const cplx I(0.0, 1.0);

TEST(CharacteristicFunction, Normalisation) {
    for (const auto& p : sample_heston_params(50, 41)) {
        for (double T : {0.1, 1.0, 10.0}) {
            EXPECT_LE(std::abs(heston_cf(p, 0.0, T) - 1.0), 1e-12);
            EXPECT_LE(std::abs(heston_cf(p, -I, T) - 1.0), 1e-12);
        }
    }
}

TEST(CharacteristicFunction, MatchesRiccatiIntegration) {
    const HestonParams feller_violating{2.0, 0.03, 0.6, -0.7, 0.05};
    for (const auto& p : {kP0, feller_violating}) {
        for (double T : {0.5, 5.0, 30.0}) {
            for (cplx z : {cplx(0.3, 0.0), cplx(2.0, -0.5), cplx(-7.0, -0.25), cplx(1.0, 0.3)}) {
                const cplx ref = testing::riccati_cf(p, z, T);
                EXPECT_LE(std::abs(heston_cf(p, z, T) - ref), 1e-10 * (1 + std::abs(ref))) << z << " T=" << T;
            }
        }
    }
}

TEST(CharacteristicFunction, LargeMaturityStaysOnBranch) {
    for (double u : {0.7, 3.0, 11.0}) {
        const cplx z(u, -0.5);
        const cplx ref = testing::riccati_cf(kP0, z, 200.0, 400000);
        EXPECT_LE(std::abs(heston_cf(kP0, z, 200.0) - ref), 1e-10 * (1 + std::abs(ref))) << u;
    }
}

TEST(CharacteristicFunction, RejectsExplodedMoment) {
    EXPECT_TRUE(std::isinf(moment_explosion_time(kP0, 3.0)));
    const double t = moment_explosion_time(kP0, 20.0);
    ASSERT_TRUE(std::isfinite(t));
    EXPECT_NO_THROW(heston_cf(kP0, cplx(0.0, -20.0), 0.5 * t));
    EXPECT_THROW(heston_cf(kP0, cplx(0.0, -20.0), 1.5 * t), DomainError);
    EXPECT_THROW(heston_cf({1.0, 0.04, 0.0, 0.0, 0.04}, 0.0, 1.0), ValidationError);
}

TEST(Pricing, P0AgainstOracle) {
    // 30-digit Lewis integral of the Heston CF (tests/oracles/p0_oracle.py)
    EXPECT_NEAR(price_call_fourier(kP0, 0.0, 1.0), 0.076187525448683071146, 1e-11);
    EXPECT_NEAR(price_call_fourier(kP0, 0.1, 1.0), 0.034498489269148930851, 1e-11);
    EXPECT_NEAR(price_call_fourier(kP0, -0.5, 5.0), 0.42174873743551725703, 1e-11);
    EXPECT_NEAR(price_call_fourier(kP0, 1.0, 20.0), 0.063933183228334357001, 1e-11);
    const double atm = price_call_fourier(kP0, 0.0, 1.0);
    EXPECT_GT(atm, 0.07);
    EXPECT_LT(atm, 0.09);
}

TEST(Pricing, AgreesWithSimpsonReference) {
    const HestonParams p{2.0, 0.06, 0.4, 0.3, 0.03};
    for (double k : {-0.3, 0.0, 0.4})
        EXPECT_NEAR(price_call_fourier(p, k, 2.0), testing::lewis_call_simpson(p, k, 2.0), 1e-9) << k;
}

TEST(Pricing, ContourChoiceDoesNotMatter) {
    for (double k : {-0.6, -0.1, 0.0, 0.2, 0.8}) {
        const double automatic = price_call_fourier(kP0, k, 3.0);
        for (double nu : {-0.5, 0.25, 0.5, 0.75, 1.5}) {
            QuadratureConfig q;
            q.contour = nu;
            EXPECT_NEAR(price_call_fourier(kP0, k, 3.0, q), automatic, 1e-11) << k << " nu=" << nu;
        }
    }
}

TEST(Pricing, HigherResolutionAgrees) {
    QuadratureConfig fine;
    fine.tolerance = 5e-13;
    const auto base = price_call_fourier_detailed(kP0, 0.0, 1.0);
    fine.truncation = 2 * base.truncation;
    EXPECT_NEAR(price_call_fourier(kP0, 0.0, 1.0, fine), base.price, 1e-12);
    EXPECT_LE(base.quadrature_error + base.truncation_error, 1e-12);
}

TEST(Pricing, DegenerateVarianceGivesIntrinsic) {
    const HestonParams p{1.0, 1e-8, 1e-4, 0.0, 1e-8};
    for (double k : {-0.2, 0.2}) {
        QuadratureConfig q;
        q.tolerance = 1e-9;
        EXPECT_NEAR(price_call_fourier(p, k, 1.0, q), std::max(1.0 - std::exp(k), 0.0), 1e-6) << k;
    }
}

TEST(Pricing, PutCallParity) {
    for (double k : {-0.4, -0.05, 0.05, 0.4}) {
        const auto otm = price_otm_fourier(kP0, k, 2.0);
        const double call = price_call_fourier(kP0, k, 2.0);
        const double put = call - (1.0 - std::exp(k));
        if (k < 0) {
            EXPECT_NEAR(put, otm.price, 1e-14);
        } else {
            EXPECT_NEAR(call, otm.price, 1e-14);
        }
        // a contour on the far side of the poles integrates the opposite
        // option; parity must bring it back to the same OTM price
        QuadratureConfig q;
        q.contour = k < 0 ? 1.5 : -0.5;
        EXPECT_NEAR(price_otm_fourier(kP0, k, 2.0, q).price, otm.price, 1e-10);
    }
}

TEST(Pricing, Monotone) {
    double prev = 2.0;
    for (double k = -0.5; k <= 0.5; k += 0.05) {
        const double c = price_call_fourier(kP0, k, 1.0);
        EXPECT_LT(c, prev);
        prev = c;
    }
    for (double k : {-0.2, 0.0, 0.3}) {
        double last = 0.0;
        for (double T : {0.25, 0.5, 1.0, 2.0, 5.0}) {
            const double c = price_call_fourier(kP0, k, T);
            EXPECT_GT(c, last);
            last = c;
        }
    }
}

TEST(Pricing, RejectsBadConfig) {
    QuadratureConfig q;
    q.tolerance = -1.0;
    EXPECT_THROW(price_call_fourier(kP0, 0.0, 1.0, q), MalformedInputError);
    EXPECT_THROW(price_call_fourier(kP0, 0.0, -1.0), DomainError);
}

TEST(Pricing, ReportsUnreachableAccuracy) {
    QuadratureConfig q;
    q.tolerance = 1e-19;
    EXPECT_THROW(price_call_fourier(kP0, 0.0, 1.0, q), AccuracyError);
}

TEST(BlackScholes, Values) {
    EXPECT_NEAR(bs_call_price(0.2, 0.0, 1.0), 0.0796556745540579629, 1e-16);
    EXPECT_EQ(bs_call_price(0.0, -0.1, 1.0), 1.0 - std::exp(-0.1));
    EXPECT_EQ(bs_call_price(0.0, 0.1, 1.0), 0.0);
    EXPECT_NEAR(bs_call_price(1e4, 0.0, 1.0), 1.0, 1e-15);
}

TEST(ImpliedVol, InvertsKnownPrice) {
    EXPECT_NEAR(implied_vol(0.0796557, 0.0, 1.0), 0.2, 1e-6);
    EXPECT_NEAR(implied_vol(0.0796556745540579629, 0.0, 1.0), 0.2, 1e-12);
}

TEST(ImpliedVol, RejectsArbitrage) {
    EXPECT_THROW(implied_vol(1.01, 0.0, 1.0), ArbitrageError);
    EXPECT_THROW(implied_vol(0.05, -0.1, 1.0), ArbitrageError);
    EXPECT_THROW(implied_vol(-0.01, 0.1, 1.0), ArbitrageError);
}

// Strikes are drawn in standardised moneyness z = k / (vol sqrt T). Far in
// the money a call price carries no representable time value, so the
// inversion is only posed where |z| stays moderate.
TEST(ImpliedVol, RandomRoundTrip) {
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> vol(0.05, 1.0), z(-3.0, 3.0), T(0.1, 10.0);
    int checked = 0;
    for (int n = 0; n < 1000; ++n) {
        const double v = vol(rng), tt = T(rng), kk = z(rng) * v * std::sqrt(tt);
        const double price = bs_call_price(v, kk, tt);
        EXPECT_NEAR(implied_vol(price, kk, tt), v, 1e-10) << v << ' ' << kk << ' ' << tt;
        ++checked;
    }
    EXPECT_EQ(checked, 1000);
}

TEST(ImpliedVol, OtmRoundTripOverWideStrikes) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> vol(0.05, 1.0), z(-8.0, 8.0), T(0.1, 10.0);
    for (int n = 0; n < 1000; ++n) {
        const double v = vol(rng), tt = T(rng), kk = z(rng) * v * std::sqrt(tt);
        EXPECT_NEAR(implied_vol_otm(bs_otm_price(v, kk, tt), kk, tt), v, 1e-10) << v << ' ' << kk << ' ' << tt;
    }
}

TEST(ImpliedVol, DeepInTheMoneyCallIsAtTheBoundary) {
    const double k = -0.8, T = 0.1;
    EXPECT_THROW(implied_vol(bs_call_price(0.05, k, T), k, T), BoundaryError);
}

TEST(Smile, AtmVolNearRootTheta) {
    const double g[] = {0.0};
    const auto s = heston_smile(kP0, 1.0, g);
    ASSERT_EQ(s.smile.size(), 1u);
    EXPECT_GT(s.smile.points()[0].vol, 0.18);
    EXPECT_LT(s.smile.points()[0].vol, 0.22);
    EXPECT_EQ(s.smile.source(), SmileSource::priced);
}

TEST(Smile, SymmetricWithoutCorrelation) {
    const HestonParams p{1.5, 0.05, 0.3, 0.0, 0.04};
    const std::vector<double> g{-0.3, -0.1, -0.02, 0.02, 0.1, 0.3};
    const auto s = heston_smile(p, 2.0, g);
    ASSERT_TRUE(s.failures.empty());
    const auto& pts = s.smile.points();
    for (std::size_t i = 0; i < pts.size() / 2; ++i)
        EXPECT_NEAR(pts[i].vol, pts[pts.size() - 1 - i].vol, 1e-8);
}

TEST(Smile, ApproachesAsymptoteAtHundred) {
    const double g[] = {0.0};
    const auto s = heston_smile(kP0, 100.0, g);
    const double v = s.smile.points()[0].vol;
    EXPECT_LE(rel_diff(v * v, heston_to_svi_omega(kP0).omega1), 0.01);
}

TEST(Smile, IndependentOfThreadCount) {
    std::vector<double> g;
    for (int i = -10; i <= 10; ++i) g.push_back(0.02 * i);
    const auto many = heston_smile(kP0, 5.0, g);
    ::setenv("HESTON_SVI_THREADS", "1", 1);
    const auto one = heston_smile(kP0, 5.0, g);
    ::unsetenv("HESTON_SVI_THREADS");
    ASSERT_EQ(many.smile.size(), one.smile.size());
    for (std::size_t i = 0; i < one.smile.size(); ++i) {
        EXPECT_EQ(many.smile.points()[i].k, one.smile.points()[i].k);
        EXPECT_EQ(many.smile.points()[i].vol, one.smile.points()[i].vol);
    }
}

TEST(Convergence, P0StrictlyDecreasing) {
    const std::vector<double> Ts{1, 5, 20, 50};
    std::vector<double> g;
    for (int i = -5; i <= 5; ++i) g.push_back(0.01 * i);
    const auto report = convergence_study(kP0, Ts, g);
    ASSERT_EQ(report.rows.size(), 4u);
    EXPECT_TRUE(report.strictly_decreasing);
    EXPECT_LE(report.rows.back().max_rel_error, report.rows.front().max_rel_error / 5);

    QuadratureConfig fine;
    fine.tolerance = 1e-13;
    const auto again = convergence_study(kP0, Ts, g, fine);
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(again.rows[i].max_rel_error, report.rows[i].max_rel_error, 1e-8);
}

TEST(Convergence, SinglePointIsAtmError) {
    const double T[] = {10.0};
    const double g[] = {0.0};
    const auto report = convergence_study(kP0, T, g);
    ASSERT_EQ(report.rows.size(), 1u);
    const double vol = implied_vol(price_call_fourier(kP0, 0.0, 10.0), 0.0, 10.0);
    const double w = heston_to_svi_omega(kP0).omega1;
    EXPECT_NEAR(report.rows[0].max_rel_error, std::abs(vol * vol - w) / w, 1e-10);
}

TEST(Convergence, RejectsUnsortedMaturities) {
    const double T[] = {5.0, 1.0};
    const double g[] = {0.0};
    EXPECT_THROW(convergence_study(kP0, T, g), MalformedInputError);
}

}  // namespace
}  // namespace hsvi
