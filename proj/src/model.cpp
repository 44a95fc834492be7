#include "fracvol/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"

namespace fracvol {

double TanhMap::operator()(double x) const { return c * std::tanh(x / c); }

double TanhMap::derivative(double x) const {
    const double s = 1.0 / std::cosh(x / c);
    return s * s;
}

double SlowTanhMap::operator()(double x) const { return sigma_min + c * (1.0 + std::tanh(x)); }

double SlowTanhMap::derivative(double x) const {
    const double s = 1.0 / std::cosh(x);
    return c * s * s;
}

void FsvModel::validate() const {
    if (!(sigma_bar > 0.0)) throw DomainError("sigma_bar must be positive");
    if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0,1)");
    if (!(std::abs(rho) <= 1.0)) throw DomainError("rho must lie in [-1,1]");
    if (!(f.c > 0.0)) throw DomainError("volatility map scale c must be positive");
    if (!(sigma_bar - f.c > 0.0))
        throw DomainError("sigma_bar + inf F must be positive (need c < sigma_bar)");
}

void SlowFsvModel::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    if (!(std::abs(rho) <= 1.0)) throw DomainError("rho must lie in [-1,1]");
    if (!(f.sigma_min > 0.0)) throw DomainError("sigma_min must be positive");
    if (!(f.c >= 0.0)) throw DomainError("volatility map scale c must be nonnegative");
    if (!std::isfinite(z0)) throw DomainError("z0 must be finite");
}

double skew_amplitude(double tau, const FsvModel& m) {
    m.validate();
    if (!(tau > 0.0)) throw DomainError("skew_amplitude requires tau > 0");
    const double H = m.fou.H();
    const double b = H + 1.5;
    const double x = m.fou.a * tau;
    // the integrand is below e^-v, so the range beyond ~40 + 2 ln x is negligible
    const double upper = std::min(x, 40.0 + 2.0 * std::log(std::max(x, 1.0)));
    const double integral =
        num::integrate([&](double v) { return std::exp(-v + b * std::log1p(-v / x)); }, 0.0, upper, 1e-14);
    const double braces = 1.0 - integral;
    return m.delta * m.rho * m.sigma_bar * std::pow(tau, H + 0.5) / (2.0 * std::tgamma(H + 2.5)) * braces;
}

SkewCoefficients skew_coefficients(const FsvModel& m) {
    m.validate();
    const double H = m.fou.H();
    const double tb = m.tau_bar();
    const double dr = m.delta * m.rho;
    return {dr * std::pow(tb, H) / (std::numbers::sqrt2 * std::tgamma(H + 2.5)),
            dr * std::pow(tb, H - 1.0) / (std::numbers::sqrt2 * m.fou.a * std::tgamma(H + 1.5)), tb};
}

}  // namespace fracvol
