// Calibration: synthetic round trips, identifiability and the skew-exponent fit.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fracvol/calibrate.hpp"
#include "fracvol/errors.hpp"
#include "fracvol/implied_vol.hpp"

using namespace fracvol;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return g;
}

const std::vector<double> kMoneyness{-0.2, -0.1, 0.0, 0.1, 0.2};

/// delta rho = -0.05 with delta = 0.1, rho = -0.5
VolSurface reference_surface(double h = 0.3, double a = 1.0, double delta = 0.1, double rho = -0.5) {
    const FsvModel m{0.2, delta, rho, FouParams(h, a), TanhMap{0.1}};
    return generate_surface(m, {}, log_grid(0.05 / a, 20.0 / a, 12), kMoneyness);
}

}  // namespace

TEST(FitParams, RecoversTheGeneratingParameters) {
    const CalibratedParams p = fit_params(reference_surface());
    EXPECT_NEAR(p.sigma_bar, 0.2, 0.002);
    EXPECT_NEAR(p.hurst.value(), 0.3, 0.02);
    EXPECT_NEAR(p.delta_rho, -0.05, 0.005);
    EXPECT_NEAR(p.a, 1.0, 0.15);
    EXPECT_TRUE(p.converged);
    EXPECT_LT(p.residual_rms, 1e-8);
    EXPECT_FALSE(p.flags.skew_absent);
    EXPECT_TRUE(p.flags.product_only);
    ASSERT_EQ(p.effective_vol_curve.size(), 12u);
    for (const auto& [tau, v] : p.effective_vol_curve) EXPECT_NEAR(v, 0.2, 1e-6) << tau;
    ASSERT_EQ(p.residuals.size(), 60u);
}

TEST(FitParams, ObjectiveNeverIncreases) {
    const CalibratedParams p = fit_params(reference_surface(0.6, 2.0));
    ASSERT_GT(p.objective_trace.size(), 2u);
    for (std::size_t i = 1; i < p.objective_trace.size(); ++i)
        EXPECT_LE(p.objective_trace[i], p.objective_trace[i - 1]);
    EXPECT_EQ(p.objective, p.objective_trace.back());
}

TEST(FitParams, OnlyTheProductDeltaRhoMatters) {
    const auto s1 = reference_surface(0.3, 1.0, 0.1, -0.5);
    const auto s2 = reference_surface(0.3, 1.0, 0.25, -0.2);
    ASSERT_EQ(s1.points.size(), s2.points.size());
    for (std::size_t i = 0; i < s1.points.size(); ++i) EXPECT_NEAR(s1.points[i].iv, s2.points[i].iv, 1e-15);
    const auto slices = regress_slices(s1, WeightRule::inverse_tau);
    EXPECT_EQ(surface_objective(slices, 0.2, 0.3, -0.05, 1.0), surface_objective(slices, 0.2, 0.3, 0.1 * -0.5, 1.0));
    EXPECT_NEAR(surface_objective(slices, 0.2, 0.3, -0.05, 1.0), 0.0, 1e-20);
}

TEST(FitParams, InvariantUnderSpotRelabelling) {
    // only K/x enters: the same log-moneyness quotes at another spot fit identically
    VolSurface a = reference_surface();
    VolSurface b = a;
    b.spot = 250.0;
    const auto pa = fit_params(a), pb = fit_params(b);
    EXPECT_EQ(pa.sigma_bar, pb.sigma_bar);
    EXPECT_EQ(pa.hurst.value(), pb.hurst.value());
    EXPECT_EQ(pa.delta_rho, pb.delta_rho);
    EXPECT_EQ(pa.a, pb.a);
}

TEST(FitParams, NoLeverageFlagsTheFractionalParameters) {
    const CalibratedParams p = fit_params(reference_surface(0.3, 1.0, 0.1, 0.0));
    EXPECT_TRUE(p.flags.skew_absent);
    EXPECT_TRUE(p.flags.hurst_unidentified);
    EXPECT_TRUE(p.flags.a_unidentified);
    EXPECT_LT(std::abs(p.delta_rho), 1e-6);
    EXPECT_NEAR(p.sigma_bar, 0.2, 1e-6);
}

TEST(FitParams, DegenerateSurfacesAreUnderIdentified) {
    const FsvModel m{0.2, 0.1, -0.5, FouParams(0.3, 1.0), TanhMap{0.1}};
    try {
        fit_params(generate_surface(m, {}, {1.0}, kMoneyness));
        FAIL() << "expected UnderIdentifiedError";
    } catch (const UnderIdentifiedError& e) {
        EXPECT_EQ(e.directions(), (std::vector<std::string>{"hurst", "a"}));
    }
    EXPECT_THROW(fit_params(generate_surface(m, {}, {0.5, 1.0}, {0.0})), UnderIdentifiedError);
    FitConfig bad;
    bad.hurst = {0.5, 0.2};
    EXPECT_THROW(fit_params(reference_surface(), bad), ConfigError);
}

TEST(FitParams, NoisySurfaceKeepsHurstClose) {
    // 10 bp iid noise on every quote; median |H error| over 20 seeds
    const VolSurface clean = reference_surface();
    std::vector<double> err_h;
    for (int seed = 0; seed < 20; ++seed) {
        VolSurface s = clean;
        std::mt19937_64 rng(1000 + seed);
        std::normal_distribution<double> noise(0.0, 1e-3);
        for (auto& p : s.points) p.iv += noise(rng);
        err_h.push_back(std::abs(fit_params(s).hurst.value() - 0.3));
    }
    std::nth_element(err_h.begin(), err_h.begin() + 10, err_h.end());
    EXPECT_LT(err_h[10], 0.05);
}

TEST(SkewExponent, SyntheticRegimes) {
    auto slopes = [](double h, const std::vector<double>& taus) {
        const FsvModel m{0.2, 0.1, -0.5, FouParams(h, 1.0), TanhMap{0.1}};
        std::vector<SkewPoint> out;
        const auto s = generate_surface(m, {}, taus, {-0.1, 0.1});
        for (std::size_t i = 0; i < taus.size(); ++i)
            out.push_back({taus[i], (s.points[2 * i + 1].iv - s.points[2 * i].iv) / 0.2});
        return out;
    };
    const auto small = log_grid(1e-3, 0.1, 8), large = log_grid(10, 1000, 8);
    auto f = fit_hurst_from_skew(slopes(0.3, small), 1.0);
    ASSERT_TRUE(f.short_exponent);
    EXPECT_NEAR(*f.short_exponent, -0.2, 0.02);
    EXPECT_FALSE(f.long_exponent);
    f = fit_hurst_from_skew(slopes(0.7, large), 1.0);
    ASSERT_TRUE(f.long_exponent);
    EXPECT_NEAR(*f.long_exponent, -0.8, 0.05);
    EXPECT_NEAR(*f.hurst_long, 0.7, 0.05);
    f = fit_hurst_from_skew(slopes(0.5, small), 1.0);
    EXPECT_NEAR(*f.short_exponent, 0.0, 0.02);
    // three points per regime is not enough
    auto mixed = slopes(0.3, {0.01, 0.03, 0.09, 20, 50, 200});
    EXPECT_THROW(fit_hurst_from_skew(mixed, 1.0), UnderIdentifiedError);
}

TEST(RegressSlices, ExactOnAffineData) {
    const auto slices = regress_slices(reference_surface(), WeightRule::inverse_tau);
    ASSERT_EQ(slices.size(), 12u);
    for (const auto& s : slices) {
        EXPECT_EQ(s.n, 5u);
        EXPECT_LT(s.rss, 1e-24);
        EXPECT_NEAR(s.weight, 1.0 / s.tau, 1e-12 / s.tau);
        EXPECT_LT(s.slope, 0.0);
    }
}
