#include "fracvol/numerics.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <limits>
#include <string>

#include "fracvol/errors.hpp"

namespace fracvol::num {
namespace bq = boost::math::quadrature;

namespace {

// Integrators are expensive to build and thread-safe once built (lazy
// refinement levels are guarded internally).
bq::tanh_sinh<double>& tanh_sinh_rule() {
    static bq::tanh_sinh<double> rule;
    return rule;
}

bq::exp_sinh<double>& exp_sinh_rule() {
    static bq::exp_sinh<double> rule;
    return rule;
}

// Boost's error estimate is the difference of the last two refinement levels
// and therefore pessimistic; only a clear miss counts as failure.
void check(double err, double l1, double rel_tol, const char* what) {
    const double accept = std::max(1e3 * rel_tol, 1e-9);
    if (!std::isfinite(err) || err > accept * l1 + std::numeric_limits<double>::min())
        throw NumericalError(std::string(what) + " did not converge", l1 > 0 ? err / l1 : err);
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double err = 0.0, l1 = 0.0;
    double v;
    try {
        // The two-argument form is used even when xc is unused: Boost 1.74's
        // one-argument finite-interval path can evaluate exactly at an endpoint.
        v = tanh_sinh_rule().integrate([&f](double x, double) { return f(x); }, a, b, rel_tol, &err, &l1);
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericalError(std::string("tanh-sinh quadrature failed: ") + e.what(),
                             std::numeric_limits<double>::infinity());
    }
    check(err, l1, rel_tol, "tanh-sinh quadrature");
    return v;
}

double integrate_with_complement(const Integrand2& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double err = 0.0, l1 = 0.0;
    double v;
    try {
        v = tanh_sinh_rule().integrate([&f](double x, double xc) { return f(x, xc); }, a, b, rel_tol, &err, &l1);
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericalError(std::string("tanh-sinh quadrature failed: ") + e.what(),
                             std::numeric_limits<double>::infinity());
    }
    check(err, l1, rel_tol, "tanh-sinh quadrature");
    return v;
}

double integrate_to_inf(const Integrand& f, double a, double rel_tol) {
    double err = 0.0, l1 = 0.0;
    double v;
    try {
        v = exp_sinh_rule().integrate([&](double u) { return f(a + u); }, rel_tol, &err, &l1);
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericalError(std::string("exp-sinh quadrature failed: ") + e.what(),
                             std::numeric_limits<double>::infinity());
    }
    check(err, l1, rel_tol, "exp-sinh quadrature");
    return v;
}

double integrate_power_tail(const Integrand& f, double a, double rel_tol) {
    if (!(a > 0.0)) throw DomainError("power-tail quadrature needs a positive lower limit");
    constexpr double ratio = 4.0;
    constexpr int max_panels = 400;
    double total = 0.0, prev = 0.0, prev_q = 0.0;
    double lo = a;
    for (int k = 0; k < max_panels; ++k) {
        const double hi = lo * ratio;
        const double s = gauss_legendre(f, lo, hi);
        total += s;
        if (s == 0.0 && k > 0) return total;
        if (k >= 2 && prev != 0.0) {
            const double q = s / prev;
            // remainder of a geometric series with the observed ratio
            if (q >= 0.0 && q < 0.97 && std::abs(q - prev_q) < 0.05) {
                const double rem = s * q / (1.0 - q);
                if (std::abs(rem) <= rel_tol * std::abs(total)) return total + rem;
            }
            prev_q = q;
        }
        prev = s;
        lo = hi;
    }
    throw NumericalError("power-tail quadrature did not settle", std::abs(prev / total));
}

double gauss_legendre(const Integrand& f, double a, double b) {
    return bq::gauss<double, 20>::integrate(f, a, b);
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

LineFit fit_line(const double* x, const double* y, std::size_t n) {
    if (n < 2) throw DomainError("line fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) throw DomainError("line fit needs distinct abscissae");
    LineFit r{sxy / sxx, 0.0, 0.0};
    r.intercept = my - r.slope * mx;
    if (n > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = y[i] - r.intercept - r.slope * x[i];
            rss += e * e;
        }
        r.slope_se = std::sqrt(rss / double(n - 2) / sxx);
    }
    return r;
}

}  // namespace fracvol::num
