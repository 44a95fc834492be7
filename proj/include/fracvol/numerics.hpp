#pragma once
/// @file numerics.hpp
/// Thin wrappers around Boost.Math quadrature plus the Gaussian helpers that
/// every pricing formula funnels through.

#include <cmath>
#include <functional>
#include <numbers>

namespace fracvol::num {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

using Integrand = std::function<double(double)>;

/// Double-exponential (tanh-sinh) quadrature on a finite interval. Tolerates
/// integrable endpoint singularities. Throws NumericalError if the error
/// estimate exceeds rel_tol relative to the L1 norm by more than a small
/// safety factor.
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-13);

/// Variant whose integrand also receives xc, the signed distance to the
/// nearest endpoint (a - x on the left half, b - x on the right half), so
/// that endpoint singularities can be evaluated without cancellation.
using Integrand2 = std::function<double(double, double)>;
double integrate_with_complement(const Integrand2& f, double a, double b, double rel_tol = 1e-13);

/// exp-sinh quadrature on [a, +inf) for algebraically or exponentially
/// decaying integrands.
double integrate_to_inf(const Integrand& f, double a, double rel_tol = 1e-12);

/// Integral over [a, +inf) for integrands with power-law or faster decay:
/// sums Gauss-Legendre panels on geometrically growing intervals and closes
/// with the geometric-series remainder implied by the last panels.
double integrate_power_tail(const Integrand& f, double a, double rel_tol = 1e-12);

/// Fixed 20-point Gauss-Legendre rule on [a, b], for smooth integrands in
/// inner loops where adaptivity is wasted.
double gauss_legendre(const Integrand& f, double a, double b);

/// Pairwise (cascade) summation in a fixed order, so sums do not depend on
/// how the values were produced.
double pairwise_sum(const double* v, std::size_t n);

/// Ordinary least squares slope and intercept of y on x.
struct LineFit {
    double slope;
    double intercept;
    double slope_se;
};
LineFit fit_line(const double* x, const double* y, std::size_t n);

}  // namespace fracvol::num
