#pragma once
/// @file model.hpp
/// Model descriptions: the small-fluctuation fSV model sigma = sigma_bar +
/// F(delta Z) and the slow-factor model sigma = F(Z^delta), together with the
/// leverage-term amplitudes that depend only on the model parameters.

#include "fracvol/kernel.hpp"

namespace fracvol {

/// F(x) = c tanh(x/c): F(0) = 0, F'(0) = 1, bounded below by -c.
struct TanhMap {
    double c = 0.1;
    double operator()(double x) const;
    double derivative(double x) const;
};

/// F(x) = sigma_min + c (1 + tanh x): positive, bounded away from zero.
struct SlowTanhMap {
    double sigma_min = 0.1;
    double c = 0.1;
    double operator()(double x) const;
    double derivative(double x) const;
};

struct FsvModel {
    double sigma_bar;
    double delta;
    double rho;
    FouParams fou;
    TanhMap f{};

    /// Throws DomainError. delta = 0 is accepted as the constant-volatility
    /// degenerate case.
    void validate() const;
    double vol(double z) const { return sigma_bar + f(delta * z); }
    double tau_bar() const { return 2.0 / (sigma_bar * sigma_bar); }
};

struct SlowFsvModel {
    double delta;
    double rho;
    FouParams fou;
    SlowTanhMap f{};
    double z0 = 0.0;

    void validate() const;
    double sigma0() const { return f(z0); }
    double p0() const { return f.derivative(z0); }
    /// delta^(1/2) K(delta t)
    KernelSpec kernel() const { return KernelSpec::fou(fou).time_dilated(delta); }
};

struct SkewCoefficients {
    double a_s;
    double a_l;
    double tau_bar;
};

/// A(tau) = delta rho sigma_bar tau^(H+1/2) / (2 Gamma(H+5/2)) * {1 - int_0^(a tau) e^-v (1 - v/(a tau))^(H+3/2) dv},
/// with the braces integrated as written (independently of d_function).
double skew_amplitude(double tau, const FsvModel& m);

SkewCoefficients skew_coefficients(const FsvModel& m);

}  // namespace fracvol
