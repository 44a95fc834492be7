#pragma once
/// @file calibrate.hpp
/// Recovery of the group parameters (sigma_bar, H, delta*rho, a) from an
/// implied-volatility surface. The first-order surface is affine in
/// log-moneyness, so each maturity is first reduced to its least-squares
/// (level, slope) pair; the weighted pointwise objective is an exact
/// quadratic form in those pairs plus a constant.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracvol/implied_vol.hpp"
#include "fracvol/kernel.hpp"

namespace fracvol {

struct ParamBounds {
    double lo;
    double hi;
};

enum class WeightRule { inverse_tau, uniform };

struct FitConfig {
    ParamBounds sigma_bar{0.01, 2.0};
    ParamBounds hurst{0.05, 0.95};
    ParamBounds delta_rho{-1.0, 1.0};
    ParamBounds a{1e-2, 1e2};
    WeightRule weights = WeightRule::inverse_tau;
    std::size_t max_iter = 4000;
    double tol = 1e-9;  ///< simplex size at which a start counts as converged
    std::size_t n_starts = 8;
    std::uint64_t seed = 20240;  ///< Latin-hypercube start placement

    void validate() const;
};

/// Per-maturity regression of iv on log-moneyness.
struct MaturitySlice {
    double tau;
    std::size_t n;
    double level;     ///< intercept at log-moneyness 0
    double slope;
    double slope_se;  ///< 0 when the slice is exactly affine
    double mean_m;
    double s_mm;      ///< sum (m - mean_m)^2
    double rss;
    double weight;
};

std::vector<MaturitySlice> regress_slices(const VolSurface& s, WeightRule rule);

struct IdentifiabilityFlags {
    bool skew_absent = false;        ///< no maturity shows a significant slope
    bool hurst_unidentified = false;
    bool a_unidentified = false;
    bool product_only = true;        ///< delta and rho enter only as a product
    std::size_t n_short_regime = 0;  ///< maturities with a tau <= 0.1
    std::size_t n_long_regime = 0;   ///< maturities with a tau >= 10
};

struct CalibratedParams {
    double sigma_bar;
    Hurst hurst{0.5};
    double delta_rho;
    double a;
    std::vector<std::pair<double, double>> effective_vol_curve;  ///< (tau, level_tau - A(tau))
    double residual_rms;
    bool converged;
    double objective;
    std::vector<double> objective_trace;  ///< best simplex value per iteration of the winning start
    std::size_t best_start;
    std::size_t iterations;
    std::vector<MaturitySlice> slices;
    std::vector<double> residuals;  ///< model minus observed, in surface order
    IdentifiabilityFlags flags;
};

/// Weighted least-squares objective of the first-order surface with phi = 0,
/// evaluated through the slice summaries.
double surface_objective(const std::vector<MaturitySlice>& slices, double sigma_bar, double hurst,
                         double delta_rho, double a);

/// Throws UnderIdentifiedError for a single maturity or a maturity with
/// fewer than two log-moneyness levels.
CalibratedParams fit_params(const VolSurface& surface, const FitConfig& cfg = {});

struct SkewPoint {
    double tau;
    double slope;
};

struct SkewExponentFit {
    std::optional<double> short_exponent;  ///< ~ H - 1/2
    std::optional<double> long_exponent;   ///< ~ H - 3/2
    std::optional<double> hurst_short;     ///< short_exponent + 1/2
    std::optional<double> hurst_long;      ///< long_exponent + 3/2
    std::size_t n_short = 0;
    std::size_t n_long = 0;
};

/// Log-log regression of |slope| on tau within each regime (a tau <= short_limit,
/// a tau >= long_limit). A regime needs at least 4 maturities; throws
/// UnderIdentifiedError when neither has enough.
SkewExponentFit fit_hurst_from_skew(const std::vector<SkewPoint>& slopes, double a, double short_limit = 0.1,
                                    double long_limit = 10.0);

}  // namespace fracvol
