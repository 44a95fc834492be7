#include "fracvol/implied_vol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"
#include "fracvol/parallel.hpp"
#include "fracvol/pricing.hpp"

namespace fracvol {

void VolSurface::validate() const {
    if (!(spot > 0.0)) throw DomainError("surface spot must be positive");
    std::map<std::pair<double, double>, int> seen;
    for (const VolPoint& p : points) {
        if (!(p.tau > 0.0)) throw DomainError("surface maturities must be positive");
        if (!(p.iv > 0.0) || !std::isfinite(p.iv)) throw DomainError("surface vols must be positive");
        if (!std::isfinite(p.log_moneyness)) throw DomainError("surface log-moneyness must be finite");
        if (++seen[{p.tau, p.log_moneyness}] > 1) {
            std::ostringstream os;
            os << "duplicate surface point tau=" << p.tau << " log_moneyness=" << p.log_moneyness;
            throw DomainError(os.str());
        }
    }
}

double bs_implied_vol(double price, double x, const EuropeanCall& option, double tau) {
    if (!(tau > 0.0)) throw DomainError("implied vol needs tau > 0");
    if (!(x > 0.0) || !(option.strike > 0.0)) throw DomainError("spot and strike must be positive");
    const double intrinsic = std::max(x - option.strike, 0.0);
    if (!(price > intrinsic && price < x)) {
        std::ostringstream os;
        os << "price " << price << " outside the no-arbitrage bounds (" << intrinsic << ", " << x << ")";
        throw DomainError(os.str());
    }
    const double sqt = std::sqrt(tau);
    auto f = [&](double s) { return bs_price(x, option, s, tau) - price; };

    double lo = 0.0, hi = 1.0;
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw NumericalError("implied vol bracket search failed", hi);
    }
    // start from the Brenner-Subrahmanyam guess, kept inside the bracket
    double s = std::sqrt(2.0 * std::numbers::pi / tau) * price / x;
    if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double v = f(s);
        if (v == 0.0) return s;
        if (v < 0.0) lo = s;
        else hi = s;
        const double d1 = std::log(x / option.strike) / (s * sqt) + 0.5 * s * sqt;
        const double vega = x * num::normal_pdf(d1) * sqt;
        double next = vega > 0.0 ? s - v / vega : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * s || hi - lo <= 1e-15 * hi) {
            s = next;
            break;
        }
        s = next;
    }
    const double err = std::abs(f(s));
    if (err > 1e-10) throw NumericalError("implied vol did not reach the price tolerance", err);
    return s;
}

namespace {

double maturity_of(const EuropeanCall& option, const MarketState& state) {
    const double tau = option.maturity - state.t;
    if (!(tau > 0.0)) throw DomainError("implied vol formulas need T > t");
    if (!(state.x > 0.0) || !(option.strike > 0.0)) throw DomainError("spot and strike must be positive");
    return tau;
}

}  // namespace

double iv_first_order(const FsvModel& m, const MarketState& state, const EuropeanCall& option) {
    m.validate();
    const double tau = maturity_of(option, state);
    const double lm = std::log(option.strike / state.x);
    const double D = d_function(tau, m.fou);
    return m.sigma_bar + m.delta * state.phi / tau +
           m.delta * m.rho * D * (m.sigma_bar / (2.0 * tau) + lm / (m.sigma_bar * tau * tau));
}

RegimeIv iv_small_maturity(const FsvModel& m, const MarketState& state, const EuropeanCall& option) {
    m.validate();
    const double tau = maturity_of(option, state);
    const double H = m.fou.H();
    const double lm = std::log(option.strike / state.x);
    const double iv = m.sigma_bar + m.delta * state.z +
                      m.delta * m.rho / std::tgamma(H + 2.5) *
                          (m.sigma_bar * std::pow(tau, 0.5 + H) / 2.0 + lm / (m.sigma_bar * std::pow(tau, 0.5 - H)));
    return {iv, !(m.fou.a * tau < 0.1)};
}

RegimeIv iv_large_maturity(const FsvModel& m, const MarketState& state, const EuropeanCall& option) {
    m.validate();
    const double tau = maturity_of(option, state);
    const double H = m.fou.H();
    const double lm = std::log(option.strike / state.x);
    const double iv = m.sigma_bar + m.delta * m.rho / (m.fou.a * std::tgamma(H + 1.5)) *
                                        (m.sigma_bar * std::pow(tau, H - 0.5) / 2.0 +
                                         lm / (m.sigma_bar * std::pow(tau, 1.5 - H)));
    return {iv, !(m.fou.a * tau > 10.0)};
}

EffectiveVolForecast effective_vol_forecast(const FsvModel& m, std::function<double(double)> phi_curve) {
    m.validate();
    const double sb = m.sigma_bar, d = m.delta;
    return {[sb, d, phi = std::move(phi_curve)](double tau) {
        if (!(tau > 0.0)) throw DomainError("forecast horizon must be positive");
        return phi ? sb + d * phi(tau) / tau : sb;
    }};
}

double iv_slow(const SlowFsvModel& m, const MarketState& state, const EuropeanCall& option) {
    m.validate();
    const double tau = maturity_of(option, state);
    const double H = m.fou.H();
    const double s0 = m.sigma0(), p0 = m.p0();
    const double tau0 = 2.0 / (s0 * s0);
    const double lm = std::log(option.strike / state.x);
    const double r = tau / tau0;
    return s0 + p0 * state.phi / tau +
           std::pow(m.delta, H) * p0 * m.rho * std::pow(tau0, H) / (std::numbers::sqrt2 * std::tgamma(H + 2.5)) *
               (std::pow(r, 0.5 + H) + std::pow(r, H - 0.5) * lm);
}

VolSurface generate_surface(const FsvModel& m, const MarketState& state, const std::vector<double>& tau_grid,
                            const std::vector<double>& moneyness_grid,
                            const std::function<double(double)>& phi_curve, double iv_min) {
    m.validate();
    if (tau_grid.empty() || moneyness_grid.empty()) throw DomainError("surface grids must be nonempty");
    for (double t : tau_grid)
        if (!(t > 0.0)) throw DomainError("surface maturities must be positive");
    if (!(state.x > 0.0)) throw DomainError("spot must be positive");
    if (!(iv_min > 0.0)) throw DomainError("iv_min must be positive");

    // phi_curve is user code and may not be thread-safe; evaluate it serially
    std::vector<double> phis(tau_grid.size(), 0.0);
    if (phi_curve)
        for (std::size_t i = 0; i < tau_grid.size(); ++i) phis[i] = phi_curve(tau_grid[i]);

    const std::size_t nm = moneyness_grid.size();
    VolSurface s;
    s.spot = state.x;
    s.as_of = state.t;
    s.points.resize(tau_grid.size() * nm);
    const long n_tau = static_cast<long>(tau_grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
    for (long i = 0; i < n_tau; ++i) {
        const double tau = tau_grid[static_cast<std::size_t>(i)];
        MarketState st = state;
        st.phi = phis[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < nm; ++j) {
            const double lm = moneyness_grid[j];
            const EuropeanCall opt{state.x * std::exp(lm), state.t + tau};
            double iv = iv_first_order(m, st, opt);
            const bool clip = !(iv >= iv_min);
            if (clip) iv = iv_min;
            s.points[static_cast<std::size_t>(i) * nm + j] = {tau, lm, iv, clip};
        }
    }
    s.validate();
    return s;
}

}  // namespace fracvol
