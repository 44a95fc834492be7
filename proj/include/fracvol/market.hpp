#pragma once
/// @file market.hpp
/// Contract and market-state records shared by pricing, Monte Carlo and
/// implied-volatility code. Zero interest rate throughout.

namespace fracvol {

struct EuropeanCall {
    double strike;
    double maturity;  ///< absolute time T
};

/// Time, spot and the conditioning information of the first-order formulas.
struct MarketState {
    double t = 0.0;
    double x = 1.0;
    double phi = 0.0;  ///< phi_t (or phi^delta_t for the slow model)
    double z = 0.0;    ///< current factor value, used by the short-maturity formula
};

}  // namespace fracvol
