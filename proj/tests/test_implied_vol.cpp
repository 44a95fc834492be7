// Implied volatility: inversion, first-order formulas and their regime forms.
// The first-order reference value comes from tests/oracles/pricing_oracle.py.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracvol/errors.hpp"
#include "fracvol/implied_vol.hpp"
#include "fracvol/kernel.hpp"
#include "fracvol/pricing.hpp"

using namespace fracvol;

namespace {

FsvModel fsv(double h, double a = 1.0, double delta = 0.1, double rho = -0.5, double sigma_bar = 0.2) {
    return FsvModel{sigma_bar, delta, rho, FouParams(h, a), TanhMap{0.1}};
}

double log_slope(double x0, double y0, double x1, double y1) {
    return std::log(std::abs(y1 / y0)) / std::log(x1 / x0);
}

}  // namespace

TEST(BsImpliedVol, RoundTrip) {
    EXPECT_NEAR(bs_implied_vol(bs_price(1, {1, 1}, 0.2, 1), 1, {1, 1}, 1), 0.2, 1e-8);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> m(-0.5, 0.5), s(0.05, 1.0), t(0.01, 5.0);
    for (int i = 0; i < 500; ++i) {
        const double tau = t(rng), sigma = s(rng), k = std::exp(m(rng));
        const EuropeanCall opt{k, tau};
        const double price = bs_price(1.0, opt, sigma, tau);
        if (price - std::max(1.0 - k, 0.0) < 1e-12) continue;  // time value lost to rounding
        const double iv = bs_implied_vol(price, 1.0, opt, tau);
        EXPECT_LE(std::abs(bs_price(1.0, opt, iv, tau) - price), 1e-10);
    }
}

TEST(BsImpliedVol, BoundaryAndStress) {
    // just above intrinsic: volatility tends to zero
    const EuropeanCall itm{0.9, 1};
    const double v = bs_implied_vol(0.1 + 1e-13, 1.0, itm, 1.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 0.05);
    // deep in the money with almost no time value: tiny vega everywhere
    for (double k : {0.82, 0.85, 0.9})
        for (double sigma : {0.12, 0.2}) {
            const EuropeanCall opt{k, 0.05};
            const double price = bs_price(1.0, opt, sigma, 0.05);
            ASSERT_GT(price, 1.0 - k);
            const double iv = bs_implied_vol(price, 1.0, opt, 0.05);
            EXPECT_LE(std::abs(bs_price(1.0, opt, iv, 0.05) - price), 1e-10);
        }
    EXPECT_THROW(bs_implied_vol(0.05, 1.0, itm, 1.0), DomainError);  // below intrinsic
    EXPECT_THROW(bs_implied_vol(1.0, 1.0, itm, 1.0), DomainError);   // at the spot
    EXPECT_THROW(bs_implied_vol(0.1, 1.0, itm, 0.0), DomainError);
}

TEST(IvFirstOrder, ReferenceValueAndDegenerateCase) {
    MarketState s;
    s.t = 0.25;
    s.phi = 0.03;
    const double iv = iv_first_order(fsv(0.3), s, {1.1, 1.25});
    EXPECT_NEAR(iv, 0.19061606508522787, 1e-12);
    EXPECT_EQ(iv_first_order(fsv(0.3, 1.0, 0.0), s, {1.1, 1.25}), 0.2);
    EXPECT_THROW(iv_first_order(fsv(0.3), s, {1.1, 0.25}), DomainError);
}

TEST(IvFirstOrder, CrossFormulaIdentityAndAffinity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        const FsvModel m = fsv(0.05 + 0.9 * u(rng), 0.1 + 3 * u(rng), 0.3 * u(rng), 2 * u(rng) - 1, 0.1 + 0.3 * u(rng));
        MarketState s;
        s.phi = 0.1 * (u(rng) - 0.5);
        const double tau = std::exp(std::log(1e-3) + u(rng) * std::log(1e5));
        const double lm = u(rng) - 0.5;
        const EuropeanCall opt{std::exp(lm), tau};
        const double A = skew_amplitude(tau, m);
        const double main_form = m.sigma_bar + m.delta * s.phi / tau + A * (1 + lm * m.tau_bar() / tau);
        const double iv = iv_first_order(m, s, opt);
        EXPECT_NEAR(iv, main_form, 1e-12 * std::max(1.0, std::abs(iv)));
        const double i0 = iv_first_order(m, s, {std::exp(lm - 0.1), tau});
        const double i2 = iv_first_order(m, s, {std::exp(lm + 0.1), tau});
        EXPECT_NEAR(i0 - 2 * iv + i2, 0.0, 1e-12 * std::max(1.0, std::abs(iv)));
        const double slope = m.delta * m.rho * d_function(tau, m.fou) / (m.sigma_bar * tau * tau);
        EXPECT_NEAR((i2 - i0) / 0.2, slope, 1e-9 * std::max(1.0, std::abs(slope)));
    }
}

TEST(IvFirstOrder, InversionConsistencyIsSecondOrder) {
    // bs_implied_vol(corrected price) - iv_first_order shrinks like delta^2
    MarketState s;
    s.phi = 0.02;
    for (double lm : {-0.2, 0.0, 0.2}) {
        const EuropeanCall opt{std::exp(lm), 1.0};
        auto gap = [&](double delta) {
            const FsvModel m = fsv(0.3, 1.0, delta);
            const double p = corrected_price(m, opt, s).total;
            return std::abs(bs_implied_vol(p, 1.0, opt, 1.0) - iv_first_order(m, s, opt));
        };
        const double r1 = gap(0.1) / gap(0.05), r2 = gap(0.05) / gap(0.025);
        EXPECT_NEAR(r1, 4.0, 0.6) << "lm " << lm;
        EXPECT_NEAR(r2, 4.0, 0.3) << "lm " << lm;
    }
}

TEST(IvSmallMaturity, ShapeAndRegime) {
    const FsvModel m = fsv(0.3);
    MarketState s;
    s.z = 0.4;
    auto iv = [&](double k, double tau) { return iv_small_maturity(m, s, {k, tau}); };
    // at the money only the level term is left
    const double tau = 0.02;
    const auto atm = iv(1.0, tau);
    const double level = m.delta * m.rho / std::tgamma(m.fou.H() + 2.5) * m.sigma_bar * std::pow(tau, 0.8) / 2;
    EXPECT_NEAR(atm.iv, m.sigma_bar + m.delta * s.z + level, 1e-15);
    EXPECT_FALSE(atm.out_of_regime);
    EXPECT_TRUE(iv(1.0, 0.5).out_of_regime);
    // off the money the correction blows up like tau^(H-1/2)
    const double g1 = iv(1.1, 1e-4).iv - m.sigma_bar - m.delta * s.z;
    const double g2 = iv(1.1, 1e-6).iv - m.sigma_bar - m.delta * s.z;
    EXPECT_NEAR(log_slope(1e-4, g1, 1e-6, g2), -0.2, 0.01);
    EXPECT_GT(std::abs(g2), std::abs(g1));
}

TEST(IvSmallMaturity, AgreesWithGeneralFormulaAtSmallATau) {
    for (double h : {0.2, 0.3, 0.7}) {
        const FsvModel m = fsv(h);
        MarketState s;  // z = phi = 0
        for (double k : {0.95, 1.0, 1.05}) {
            const double g = iv_first_order(m, s, {k, 0.01});
            const double r = iv_small_maturity(m, s, {k, 0.01}).iv;
            EXPECT_LT(std::abs(r - g) / g, 0.02);
            // the corrections themselves also match to leading order in a tau
            EXPECT_LT(std::abs((r - m.sigma_bar) - (g - m.sigma_bar)), 0.02 * std::abs(g - m.sigma_bar));
        }
    }
}

TEST(IvLargeMaturity, ShapeAndRegime) {
    MarketState s;
    const FsvModel rough = fsv(0.3);
    EXPECT_NEAR(iv_large_maturity(rough, s, {1.0, 1e14}).iv, rough.sigma_bar, 1e-5);
    EXPECT_TRUE(iv_large_maturity(rough, s, {1.0, 2.0}).out_of_regime);
    const FsvModel smooth = fsv(0.7);
    const double l1 = iv_large_maturity(smooth, s, {1.0, 1e3}).iv - smooth.sigma_bar;
    const double l2 = iv_large_maturity(smooth, s, {1.0, 1e5}).iv - smooth.sigma_bar;
    EXPECT_NEAR(log_slope(1e3, l1, 1e5, l2), 0.2, 0.01);
    for (double h : {0.3, 0.7})
        for (double k : {0.8, 1.0, 1.25}) {
            const FsvModel m = fsv(h);
            const double g = iv_first_order(m, s, {k, 100.0});
            const double r = iv_large_maturity(m, s, {k, 100.0}).iv;
            EXPECT_LT(std::abs(r - g) / g, 0.02);
            EXPECT_FALSE(iv_large_maturity(m, s, {k, 100.0}).out_of_regime);
        }
}

TEST(EffectiveVol, Forecasts) {
    const FsvModel m = fsv(0.3);
    const auto flat = effective_vol_forecast(m, {});
    for (double tau : {0.01, 1.0, 100.0}) EXPECT_EQ(flat(tau), m.sigma_bar);
    const double z = 0.5;
    // phi(tau) ~ tau Z for small tau, vanishing as tau grows
    const auto f = effective_vol_forecast(m, [&](double tau) { return z * tau * std::exp(-tau); });
    EXPECT_NEAR(f(1e-6), m.sigma_bar + m.delta * z, 1e-6);
    EXPECT_NEAR(f(1e3), m.sigma_bar, 1e-12);
    EXPECT_THROW(f(0.0), DomainError);
}

TEST(IvSlow, MatchesSmallMaturityShapeUnderSubstitution) {
    SlowFsvModel m{0.04, -0.5, FouParams(0.3, 1.0), SlowTanhMap{0.05, 0.15}, 0.3};
    MarketState s;
    const double s0 = m.sigma0(), p0 = m.p0();
    const FsvModel sub{s0, std::pow(m.delta, 0.3) * p0, m.rho, m.fou, TanhMap{0.1}};
    for (double tau : {0.05, 0.5, 2.0})
        for (double k : {0.9, 1.0, 1.1}) {
            const double a = iv_slow(m, s, {k, tau});
            const double b = iv_small_maturity(sub, s, {k, tau}).iv;
            EXPECT_NEAR(a, b, 1e-14);
        }
    // reference value
    s.phi = -0.01;
    EXPECT_NEAR(iv_slow(m, s, {0.95, 0.5}), 0.24362924962838939, 1e-13);
    // saturated map: p0 ~ 0 leaves sigma0
    SlowFsvModel flat = m;
    flat.z0 = 40.0;
    EXPECT_NEAR(iv_slow(flat, s, {0.9, 1.0}), flat.sigma0(), 1e-15);
    EXPECT_THROW(iv_slow(m, s, {1.0, 0.0}), DomainError);
}

TEST(IvSlow, SkewSlopeMatchesFiniteDifference) {
    SlowFsvModel m{0.04, -0.5, FouParams(0.3, 1.0), SlowTanhMap{0.05, 0.15}, 0.0};
    const double s0 = m.sigma0(), p0 = m.p0(), H = 0.3, t0 = 2 / (s0 * s0);
    for (double tau : {0.1, 1.0, 3.0}) {
        const double h = 1e-5;
        const double fd = (iv_slow(m, {}, {std::exp(h), tau}) - iv_slow(m, {}, {std::exp(-h), tau})) / (2 * h);
        const double want = std::pow(m.delta, H) * p0 * m.rho * std::pow(t0, H) * std::pow(tau / t0, H - 0.5) /
                            (std::sqrt(2.0) * std::tgamma(H + 2.5));
        EXPECT_NEAR(fd, want, 1e-9);
    }
}

TEST(GenerateSurface, FlatWithoutLeverageAndAffineWithIt) {
    const std::vector<double> taus{0.1, 0.5, 1, 2}, ms{-0.2, -0.1, 0, 0.1, 0.2};
    const auto flat = generate_surface(fsv(0.3, 1.0, 0.1, 0.0), {}, taus, ms);
    ASSERT_EQ(flat.points.size(), taus.size() * ms.size());
    for (const auto& p : flat.points) EXPECT_EQ(p.iv, 0.2);
    const auto s = generate_surface(fsv(0.3), {}, taus, ms);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        EXPECT_EQ(s.points[i * ms.size()].tau, taus[i]);  // tau-major order
        const double a = s.points[i * ms.size()].iv, b = s.points[i * ms.size() + 2].iv,
                     c = s.points[i * ms.size() + 4].iv;
        EXPECT_NEAR(a - 2 * b + c, 0.0, 1e-14);
    }
    EXPECT_NO_THROW(s.validate());
}

TEST(GenerateSurface, ClipsAndFlags) {
    // strong leverage at very short maturity drives the formula negative
    const auto s = generate_surface(fsv(0.1, 1.0, 0.5, 0.9), {}, {1e-4}, {-0.5, 0.0, 0.5}, {}, 1e-4);
    bool clipped = false;
    for (const auto& p : s.points) {
        EXPECT_GE(p.iv, 1e-4);
        clipped = clipped || p.clipped;
        if (p.clipped) EXPECT_EQ(p.iv, 1e-4);
    }
    EXPECT_TRUE(clipped);
}

TEST(GenerateSurface, SkewPowerLawsInBothRegimes) {
    const std::vector<double> ms{-0.1, 0.1};
    auto slope = [&](const FsvModel& m, double tau) {
        const auto s = generate_surface(m, {}, {tau}, ms);
        return (s.points[1].iv - s.points[0].iv) / 0.2;
    };
    for (double h : {0.2, 0.3, 0.7}) {
        const FsvModel m = fsv(h);
        EXPECT_NEAR(log_slope(1e-3, slope(m, 1e-3), 1e-1, slope(m, 1e-1)), h - 0.5, 0.05);
        EXPECT_NEAR(log_slope(10, slope(m, 10), 1e3, slope(m, 1e3)), h - 1.5, 0.05);
    }
}

TEST(VolSurface, ValidationRejectsDuplicatesAndBadValues) {
    VolSurface s;
    s.points = {{1.0, 0.0, 0.2}, {1.0, 0.0, 0.21}};
    EXPECT_THROW(s.validate(), DomainError);
    s.points = {{-1.0, 0.0, 0.2}};
    EXPECT_THROW(s.validate(), DomainError);
    s.points = {{1.0, 0.0, 0.0}};
    EXPECT_THROW(s.validate(), DomainError);
}
