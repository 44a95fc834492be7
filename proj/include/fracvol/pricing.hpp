#pragma once
/// @file pricing.hpp
/// Black-Scholes base price and first-order corrected prices for the
/// small-fluctuation and slow-factor models, at zero interest rate.

#include "fracvol/market.hpp"
#include "fracvol/model.hpp"

namespace fracvol {

struct PriceBreakdown {
    double q0 = 0.0;
    double random_term = 0.0;
    double skew_term = 0.0;
    double total = 0.0;
    double sigma = 0.0;  ///< volatility the base price uses (sigma_bar or sigma0)
    double p0 = 0.0;     ///< F'(z0) for the slow model, 0 otherwise
};

/// Q0 at volatility sigma with time to maturity tau. tau = 0 (or sigma = 0)
/// gives the payoff. The in-the-money branch goes through put-call parity so
/// the time value keeps its relative accuracy.
double bs_price(double x, const EuropeanCall& option, double sigma, double tau);

struct BsOperators {
    double gamma;  ///< x^2 d^2Q0/dx^2
    double skew;   ///< x d/dx (x^2 d^2Q0/dx^2)
};
BsOperators bs_derivative_operators(double x, const EuropeanCall& option, double sigma, double tau);

struct PricingOptions {
    /// Below this time to maturity (years) the payoff is returned instead of
    /// evaluating the diverging derivative operators.
    double tau_floor = 1e-8;
};

/// Q0 + delta sigma_bar phi_t x^2 Q0'' + delta rho sigma_bar^2 x(x^2 Q0'')' D(T-t).
PriceBreakdown corrected_price(const FsvModel& m, const EuropeanCall& option, const MarketState& state,
                               const PricingOptions& opt = {});

/// Q0(sigma0) + sigma0 p0 phi^delta_t x^2 Q0'' + delta^H rho p0 sigma0^2 x(x^2 Q0'')' (T-t)^(H+3/2)/Gamma(H+5/2),
/// with state.phi read as phi^delta_t.
PriceBreakdown slow_corrected_price(const SlowFsvModel& m, const EuropeanCall& option, const MarketState& state,
                                    const PricingOptions& opt = {});

/// Leading small-delta variance of phi^delta_t:
/// delta^(2H) T^(2+2H) / Gamma(H+3/2)^2 times the bracket integral in r = t/T.
double phi_delta_variance(double t, double T, const FouParams& p, double delta);

/// The same variance without the small-delta expansion, by quadrature of
/// int_0^t (theta(T-u) - theta(t-u))^2 du + int_0^inf (theta(T+w) - theta(t+w) - (T-t)K(w))^2 dw
/// for the dilated kernel.
double phi_delta_variance_exact(double t, double T, const FouParams& p, double delta);

}  // namespace fracvol
