#pragma once
/// @file implied_vol.hpp
/// Black-Scholes inversion, the first-order implied-volatility formulas and
/// their short/long maturity forms, effective-volatility forecasts and
/// surface generation. log-moneyness is log(K/x) throughout.

#include <functional>
#include <vector>

#include "fracvol/market.hpp"
#include "fracvol/model.hpp"

namespace fracvol {

struct VolPoint {
    double tau;
    double log_moneyness;
    double iv;
    bool clipped = false;  ///< formula value was below iv_min and was raised to it
};

struct VolSurface {
    std::vector<VolPoint> points;
    double spot = 1.0;
    double as_of = 0.0;

    /// Throws DomainError on nonpositive tau or iv, or duplicate (tau, m) pairs.
    void validate() const;
};

/// Volatility reproducing `price`, to 1e-10 absolute in price. Safeguarded
/// Newton: every iterate stays inside a shrinking bracket and falls back to
/// bisection when the Newton step leaves it.
double bs_implied_vol(double price, double x, const EuropeanCall& option, double tau);

/// sigma_bar + delta phi/tau + delta rho D(tau) [sigma_bar/(2 tau) + log(K/x)/(sigma_bar tau^2)].
double iv_first_order(const FsvModel& m, const MarketState& state, const EuropeanCall& option);

struct RegimeIv {
    double iv;
    bool out_of_regime;  ///< a tau >= 0.1 (short form) or a tau <= 10 (long form)
};

/// Short-maturity form, using the current factor value state.z.
RegimeIv iv_small_maturity(const FsvModel& m, const MarketState& state, const EuropeanCall& option);
/// Long-maturity form.
RegimeIv iv_large_maturity(const FsvModel& m, const MarketState& state, const EuropeanCall& option);

struct EffectiveVolForecast {
    std::function<double(double)> curve;  ///< tau -> sigma_{t,t+tau}
    double operator()(double tau) const { return curve(tau); }
};

/// sigma_bar + delta phi(tau)/tau; an empty phi_curve means phi = 0.
EffectiveVolForecast effective_vol_forecast(const FsvModel& m, std::function<double(double)> phi_curve);

/// Slow-factor implied volatility with tau0 = 2/sigma0^2; state.phi is phi^delta_t.
double iv_slow(const SlowFsvModel& m, const MarketState& state, const EuropeanCall& option);

/// iv_first_order on the grid, tau-major. phi_curve gives phi_t for each
/// maturity (zero when empty). Values below iv_min are clipped and flagged.
VolSurface generate_surface(const FsvModel& m, const MarketState& state, const std::vector<double>& tau_grid,
                            const std::vector<double>& moneyness_grid,
                            const std::function<double(double)>& phi_curve = {}, double iv_min = 1e-4);

}  // namespace fracvol
