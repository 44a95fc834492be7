#include "fracvol/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"

namespace fracvol {

namespace {

void check_inputs(double x, const EuropeanCall& option, double sigma, double tau) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("spot must be positive");
    if (!(option.strike > 0.0) || !std::isfinite(option.strike)) throw DomainError("strike must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("volatility must be nonnegative");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("time to maturity must be nonnegative");
}

}  // namespace

double bs_price(double x, const EuropeanCall& option, double sigma, double tau) {
    check_inputs(x, option, sigma, tau);
    const double K = option.strike;
    const double intrinsic = std::max(x - K, 0.0);
    if (tau == 0.0 || sigma == 0.0) return intrinsic;
    const double sd = sigma * std::sqrt(tau);
    const double d1 = std::log(x / K) / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    if (x > K) return (x - K) + (K * num::normal_cdf(-d2) - x * num::normal_cdf(-d1));
    return x * num::normal_cdf(d1) - K * num::normal_cdf(d2);
}

BsOperators bs_derivative_operators(double x, const EuropeanCall& option, double sigma, double tau) {
    check_inputs(x, option, sigma, tau);
    if (tau == 0.0) throw DomainError("derivative operators diverge at tau = 0");
    if (sigma == 0.0) throw DomainError("derivative operators need sigma > 0");
    const double sd = sigma * std::sqrt(tau);
    const double d1 = std::log(x / option.strike) / sd + 0.5 * sd;
    const double gamma = x * num::normal_pdf(d1) / sd;
    return {gamma, gamma * (1.0 - d1 / sd)};
}

namespace {

double time_to_maturity(const EuropeanCall& option, const MarketState& state) {
    const double tau = option.maturity - state.t;
    if (!(tau > 0.0)) throw DomainError("corrected prices need t < T");
    if (!std::isfinite(state.phi)) throw DomainError("phi must be finite");
    return tau;
}

PriceBreakdown payoff_only(double x, const EuropeanCall& option, double sigma) {
    PriceBreakdown b;
    b.q0 = b.total = std::max(x - option.strike, 0.0);
    b.sigma = sigma;
    return b;
}

}  // namespace

PriceBreakdown corrected_price(const FsvModel& m, const EuropeanCall& option, const MarketState& state,
                               const PricingOptions& opt) {
    m.validate();
    const double tau = time_to_maturity(option, state);
    if (tau < opt.tau_floor) return payoff_only(state.x, option, m.sigma_bar);
    PriceBreakdown b;
    b.sigma = m.sigma_bar;
    b.q0 = bs_price(state.x, option, m.sigma_bar, tau);
    const BsOperators op = bs_derivative_operators(state.x, option, m.sigma_bar, tau);
    b.random_term = m.delta * m.sigma_bar * state.phi * op.gamma;
    b.skew_term = m.delta * m.rho * m.sigma_bar * m.sigma_bar * op.skew * d_function(tau, m.fou);
    b.total = b.q0 + b.random_term + b.skew_term;
    return b;
}

PriceBreakdown slow_corrected_price(const SlowFsvModel& m, const EuropeanCall& option, const MarketState& state,
                                    const PricingOptions& opt) {
    m.validate();
    const double tau = time_to_maturity(option, state);
    const double s0 = m.sigma0();
    const double p0 = m.p0();
    if (tau < opt.tau_floor) {
        PriceBreakdown b = payoff_only(state.x, option, s0);
        b.p0 = p0;
        return b;
    }
    const double H = m.fou.H();
    PriceBreakdown b;
    b.sigma = s0;
    b.p0 = p0;
    b.q0 = bs_price(state.x, option, s0, tau);
    const BsOperators op = bs_derivative_operators(state.x, option, s0, tau);
    b.random_term = s0 * p0 * state.phi * op.gamma;
    b.skew_term = std::pow(m.delta, H) * m.rho * p0 * s0 * s0 * op.skew * std::pow(tau, H + 1.5) /
                  std::tgamma(H + 2.5);
    b.total = b.q0 + b.random_term + b.skew_term;
    return b;
}

namespace {

// (1+w)^p - (r+w)^p - (1-r) p w^(p-1); for large w the first-order terms
// cancel exactly and the binomial series from k = 2 is summed instead
double lead_bracket_far(double w, double r, double p) {
    if (w < 50.0) return std::pow(1.0 + w, p) - std::pow(r + w, p) - (1.0 - r) * p * std::pow(w, p - 1.0);
    double binom = p, rk = r, sum = 0.0, inv = 1.0 / w, ik = inv;
    for (int k = 2; k < 40; ++k) {
        binom *= (p - k + 1) / k;
        rk *= r;
        ik *= inv;
        const double term = binom * ik * (1.0 - rk);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::pow(w, p) * sum;
}

}  // namespace

double phi_delta_variance(double t, double T, const FouParams& prm, double delta) {
    if (!(t >= 0.0 && t <= T) || !std::isfinite(T)) throw DomainError("phi_delta_variance needs 0 <= t <= T");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    if (T == 0.0 || t == T) return 0.0;
    const double H = prm.H();
    const double p = H + 0.5;
    const double r = t / T;
    const double g = std::tgamma(H + 1.5);
    const double scale = std::pow(delta, 2.0 * H) * std::pow(T, 2.0 + 2.0 * H) / (g * g);
    // at H = 1/2 the second bracket vanishes identically and the first is 1 - r
    if (prm.hurst.is_half()) return scale * r * (1.0 - r) * (1.0 - r);
    double I = 0.0;
    if (r > 0.0)
        I += num::integrate(
            [&](double v) { const double d = std::pow(1.0 - r + v, p) - std::pow(v, p); return d * d; }, 0.0, r,
            1e-12);
    auto far = [&](double w) { const double d = lead_bracket_far(w, r, p); return d * d; };
    I += num::integrate(far, 0.0, 1.0, 1e-12) + num::integrate(far, 1.0, 50.0, 1e-12) +
         num::integrate_power_tail(far, 50.0, 1e-12);
    return scale * I;
}

double phi_delta_variance_exact(double t, double T, const FouParams& prm, double delta) {
    if (!(t >= 0.0 && t <= T) || !std::isfinite(T)) throw DomainError("phi_delta_variance needs 0 <= t <= T");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    if (T == 0.0 || t == T) return 0.0;
    const KernelSpec k = KernelSpec::fou(prm).time_dilated(delta);
    const double tau = T - t;
    double I = 0.0;
    if (t > 0.0)
        I += num::integrate(
            [&](double v) { const double d = k.primitive(v + tau) - k.primitive(v); return d * d; }, 0.0, t, 1e-12);
    auto f = [&](double w) {
        double d;
        if (w < 8.0 * T) {
            d = k.primitive(T + w) - k.primitive(t + w) - tau * k(w);
        } else {
            const double kw = k(w);
            d = num::gauss_legendre([&](double s) { return k(s + w) - kw; }, t, T);
        }
        return d * d;
    };
    I += num::integrate(f, 0.0, T, 1e-12) + num::integrate(f, T, 8.0 * T, 1e-12) +
         num::integrate_power_tail(f, 8.0 * T, 1e-12);
    return I;
}

}  // namespace fracvol
