/// @file kernel.cpp
/// fOU kernel primitives, covariance forms and general-kernel quadratures.

#include "fracvol/kernel.hpp"

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"

namespace fracvol {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Truncation point for int_0^x e^-v g(v) dv when x is large: the neglected
// piece is below e^-cut * x, i.e. negligible against the O(1/x) result.
double exp_cutoff(double x) { return std::min(x, 40.0 + 2.0 * std::log(std::max(x, 1.0))); }

void require_half_excluded(const Hurst& h, const char* what) {
    if (h.is_half())
        throw DomainError(std::string(what) + " is undefined at H = 1/2 (no power-law regime)");
}

}  // namespace

Hurst::Hurst(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("Hurst exponent must lie in (0,1), got " + std::to_string(h));
}

FouParams::FouParams(Hurst h, double a_) : hurst(h), a(a_) {
    if (!(a_ > 0.0) || !std::isfinite(a_))
        throw DomainError("mean-reversion rate a must be positive and finite, got " + std::to_string(a_));
}

namespace detail {

double kummer_bracket(double b, double x) {
    if (!(b > -1.0)) throw DomainError("bracket exponent must exceed -1");
    if (x < 0.0) throw DomainError("bracket argument must be nonnegative");
    if (x == 0.0) return 1.0;
    if (b == 0.0) return std::exp(-x);
    if (x < 0.05) {
        // sum_n (-x)^n / ((b+1)...(b+n))
        double term = 1.0, sum = 1.0;
        for (int n = 1; n < 40 && std::abs(term) > 1e-18 * std::abs(sum); ++n) {
            term *= -x / (b + n);
            sum += term;
        }
        return sum;
    }
    if (b == 1.0) return -std::expm1(-x) / x;
    if (b == 2.0) return 2.0 * (x + std::expm1(-x)) / (x * x);
    if (x >= 45.0) {
        // asymptotic series b/x sum_s (1-b)_s x^-s; the smallest term and the
        // dropped e^-x part are both below 1e-17 here
        double term = b / x, sum = term;
        for (int s = 1; s < 200; ++s) {
            const double next = term * (s - b) / x;
            if (std::abs(next) >= std::abs(term) || std::abs(next) < 1e-18 * std::abs(sum)) break;
            term = next;
            sum += term;
        }
        return sum;
    }
    // M(1,b+1,-x) = 1 - int_0^x e^-v (1-v/x)^b dv
    //             = e^-x + int_0^x e^-v [1 - (1-v/x)^b] dv
    // The second form keeps full relative accuracy when the result is O(1/x).
    const double cut = exp_cutoff(x);
    if (cut < x) {
        const double rest = num::integrate(
            [b, x](double v) { return -std::exp(-v) * std::expm1(b * std::log1p(-v / x)); }, 0.0, cut);
        return std::exp(-x) + rest;
    }
    // Upper endpoint is v = x, where (1-v/x)^b is singular for b < 0; use the
    // exact distance x - v there.
    const double rest = num::integrate_with_complement(
        [b, x](double v, double vc) {
            const double l = vc > 0.0 ? std::log(vc / x) : std::log1p(-v / x);
            return -std::exp(-v) * std::expm1(b * l);
        },
        0.0, x);
    return std::exp(-x) + rest;
}

}  // namespace detail

double sigma_h_sq(Hurst h) {
    const double H = h.value();
    return 1.0 / (std::tgamma(2.0 * H + 1.0) * std::sin(kPi * H));
}

double kernel_fou(double t, const FouParams& p) {
    if (!(t > 0.0)) throw DomainError("kernel_fou requires t > 0");
    if (p.hurst.is_half()) return std::exp(-p.a * t);
    const double al = p.H() - 0.5;
    return std::pow(t, al) / std::tgamma(p.H() + 0.5) * detail::kummer_bracket(al, p.a * t);
}

double sigma_ou_sq(const FouParams& p) {
    const double H = p.H();
    return 0.5 * std::pow(p.a, -2.0 * H) * std::tgamma(2.0 * H + 1.0) * sigma_h_sq(p.hurst);
}

double theta_fou(double tau, const FouParams& p) {
    if (tau < 0.0) throw DomainError("theta requires tau >= 0");
    if (tau == 0.0) return 0.0;
    if (p.hurst.is_half()) return -std::expm1(-p.a * tau) / p.a;
    const double b = p.H() + 0.5;
    return std::pow(tau, b) / std::tgamma(b + 1.0) * detail::kummer_bracket(b, p.a * tau);
}

double d_function(double tau, const FouParams& p) {
    if (tau < 0.0) throw DomainError("d_function requires tau >= 0");
    if (tau == 0.0) return 0.0;
    const double b = p.H() + 1.5;
    return std::pow(tau, b) / std::tgamma(b + 1.0) * detail::kummer_bracket(b, p.a * tau);
}

// ---------------------------------------------------------------------------
// KernelSpec

KernelSpec KernelSpec::fou(const FouParams& p) { return KernelSpec(Base{p}); }

KernelSpec KernelSpec::power_law_cutoff(Hurst h, double d_z, double a) {
    if (!(d_z > 0.0)) throw DomainError("origin constant d_Z must be positive");
    if (!(a > 0.0)) throw DomainError("cutoff rate must be positive");
    return KernelSpec(Base{CutoffKernel{h, d_z, a}});
}

KernelSpec KernelSpec::time_dilated(double delta) const {
    if (!(delta > 0.0)) throw DomainError("time dilation factor must be positive");
    KernelSpec k = *this;
    k.amp_ *= std::sqrt(delta);
    k.scale_ *= delta;
    return k;
}

double KernelSpec::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("kernel evaluation requires t > 0");
    const double u = scale_ * t;
    return amp_ * std::visit(overloaded{[u](const FouParams& p) { return kernel_fou(u, p); },
                                        [u](const CutoffKernel& c) {
                                            return c.d_z * std::pow(u, c.hurst.value() - 0.5) *
                                                   std::exp(-c.a * u);
                                        }},
                             base_);
}

double KernelSpec::primitive(double tau) const {
    if (tau < 0.0) throw DomainError("theta requires tau >= 0");
    if (tau == 0.0) return 0.0;
    const double u = scale_ * tau;
    const double v = std::visit(
        overloaded{[u](const FouParams& p) { return theta_fou(u, p); },
                   [u](const CutoffKernel& c) {
                       const double b = c.hurst.value() + 0.5;
                       return c.d_z * std::pow(c.a, -b) * boost::math::tgamma_lower(b, c.a * u);
                   }},
        base_);
    return amp_ / scale_ * v;
}

double KernelSpec::second_primitive(double tau) const {
    if (tau < 0.0) throw DomainError("D requires tau >= 0");
    if (tau == 0.0) return 0.0;
    const double u = scale_ * tau;
    const double v = std::visit(
        overloaded{[u](const FouParams& p) { return d_function(u, p); },
                   [u](const CutoffKernel& c) {
                       // int_0^u (u-s) K(s) ds = u theta(u) - int_0^u s K(s) ds
                       const double b = c.hurst.value() + 0.5;
                       const double th = c.d_z * std::pow(c.a, -b) * boost::math::tgamma_lower(b, c.a * u);
                       const double m1 = c.d_z * std::pow(c.a, -b - 1.0) * boost::math::tgamma_lower(b + 1.0, c.a * u);
                       return u * th - m1;
                   }},
        base_);
    return amp_ / (scale_ * scale_) * v;
}

Hurst KernelSpec::hurst() const {
    return std::visit(overloaded{[](const FouParams& p) { return p.hurst; },
                                 [](const CutoffKernel& c) { return c.hurst; }},
                      base_);
}

double KernelSpec::sigma_z_sq() const {
    const double v = std::visit(
        overloaded{[](const FouParams& p) { return sigma_ou_sq(p); },
                   [](const CutoffKernel& c) {
                       const double H = c.hurst.value();
                       return c.d_z * c.d_z * std::tgamma(2.0 * H) * std::pow(2.0 * c.a, -2.0 * H);
                   }},
        base_);
    return amp_ * amp_ / scale_ * v;
}

double KernelSpec::tail_constant() const {
    const double H = hurst().value();
    const double c = std::visit(overloaded{[](const FouParams& p) {
                                               return p.hurst.is_half() ? 0.0
                                                                        : 1.0 / (p.a * std::tgamma(p.H() - 0.5));
                                           },
                                           [](const CutoffKernel&) { return 0.0; }},
                                base_);
    return amp_ * c * std::pow(scale_, H - 1.5);
}

double KernelSpec::origin_constant() const {
    const double H = hurst().value();
    const double d = std::visit(overloaded{[](const FouParams& p) { return 1.0 / std::tgamma(p.H() + 0.5); },
                                           [](const CutoffKernel& c) { return c.d_z; }},
                                base_);
    return amp_ * d * std::pow(scale_, H - 0.5);
}

double KernelSpec::time_scale() const {
    const double a = std::visit(overloaded{[](const FouParams& p) { return p.a; },
                                           [](const CutoffKernel& c) { return c.a; }},
                                base_);
    return 1.0 / (a * scale_);
}

std::optional<FouParams> KernelSpec::fou_params() const {
    if (amp_ != 1.0 || scale_ != 1.0) return std::nullopt;
    if (const auto* p = std::get_if<FouParams>(&base_)) return *p;
    return std::nullopt;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{[&](const FouParams& p) { os << "fou(H=" << p.H() << ",a=" << p.a << ")"; },
                          [&](const CutoffKernel& c) {
                              os << "power_law_cutoff(H=" << c.hurst.value() << ",d_z=" << c.d_z << ",a=" << c.a
                                 << ")";
                          }},
               base_);
    if (scale_ != 1.0) os << " dilated by " << scale_;
    return os.str();
}

double theta(double tau, const KernelSpec& k) { return k.primitive(tau); }

// ---------------------------------------------------------------------------
// Quadrature-based quantities

double d_function_quadrature(double tau, const KernelSpec& k) {
    if (tau < 0.0) throw DomainError("d_function_quadrature requires tau >= 0");
    if (tau == 0.0) return 0.0;
    // u = tau w keeps the interval O(1) whatever the scale of tau
    auto f = [&](double w) { return (1.0 - w) * k(tau * w); };
    const double wb = k.time_scale() / tau;
    double v;
    if (wb >= 0.25) v = num::integrate(f, 0.0, 1.0, 1e-12);
    else v = num::integrate(f, 0.0, wb, 1e-12) + num::integrate(f, wb, 1.0, 1e-12);
    return tau * tau * v;
}

namespace {

// theta(u + tau) - theta(u), switching to direct quadrature of K once u is
// far enough from the origin that the difference would cancel.
double theta_increment(const KernelSpec& k, double u, double tau) {
    if (u < 8.0 * tau) return k.primitive(u + tau) - k.primitive(u);
    return num::gauss_legendre([&](double s) { return k(s); }, u, u + tau);
}

}  // namespace

double phi_variance_quadrature(double tau, const KernelSpec& k) {
    if (tau < 0.0) throw DomainError("phi_variance requires tau >= 0");
    if (tau == 0.0) return 0.0;
    auto f = [&](double u) {
        const double d = theta_increment(k, u, tau);
        return d * d;
    };
    const double u0 = 8.0 * tau;
    const double u1 = std::max(u0, 10.0 * k.time_scale());
    double v = num::integrate(f, 0.0, u0, 1e-12);
    if (u1 > u0) v += num::integrate(f, u0, u1, 1e-12);
    v += num::integrate_power_tail(f, u1, 1e-12);
    return v;
}

double phi_variance(double tau, const KernelSpec& k) {
    if (tau < 0.0) throw DomainError("phi_variance requires tau >= 0");
    if (auto p = k.fou_params(); p && p->hurst.is_half()) {
        const double e = -std::expm1(-p->a * tau);
        return e * e / (2.0 * p->a * p->a * p->a);
    }
    return phi_variance_quadrature(tau, k);
}

// ---------------------------------------------------------------------------
// Covariances

namespace {

// |1+w|^(2H) - 1 - 2H w without cancellation for small w.
double taylor_remainder(double w, double H) {
    const double e = 2.0 * H;
    if (std::abs(w) < 0.01) {
        double c = e * (e - 1.0) / 2.0, wk = w * w, sum = 0.0;
        for (int j = 2; j < 10; ++j) {
            sum += c * wk;
            c *= (e - j) / (j + 1);
            wk *= w;
        }
        return sum;
    }
    if (w > -1.0) return std::expm1(e * std::log1p(w)) - e * w;
    return std::pow(-1.0 - w, e) - 1.0 - e * w;
}

// (1/2) int_R e^-|v| |y+v|^2H dv - y^2H, for y = a s > 0.
double cov_bracket(double y, double H) {
    const double e = 2.0 * H;
    if (y < 1.0) {
        auto f = [=](double v) { return std::exp(-std::abs(v)) * std::pow(std::abs(y + v), e); };
        const double right = num::integrate_to_inf(f, 0.0, 1e-13);
        const double mid = num::integrate(f, -y, 0.0, 1e-13);
        const double left = std::exp(-y) * std::tgamma(e + 1.0);  // int_{-inf}^{-y}
        return 0.5 * (right + mid + left) - std::pow(y, e);
    }
    // Subtract the first-order Taylor term of |y+v|^2H around v = 0; it
    // integrates to exactly y^2H against the symmetric weight.
    const double ye = std::pow(y, e);
    auto h = [=](double v) { return std::exp(-std::abs(v)) * taylor_remainder(v / y, H); };
    const double cut = exp_cutoff(y);
    double s = num::integrate_to_inf(h, 0.0, 1e-13) + num::integrate(h, -cut, 0.0, 1e-13);
    if (cut == y) s += num::integrate_to_inf([&](double w) { return h(-y - w); }, 0.0, 1e-13);
    return 0.5 * ye * s;
}

}  // namespace

double cov_fou(double s, const FouParams& p) {
    s = std::abs(s);
    const double sig2 = sigma_ou_sq(p);
    if (s == 0.0) return sig2;
    if (p.hurst.is_half()) return sig2 * std::exp(-p.a * s);
    const double H = p.H();
    return sig2 / std::tgamma(2.0 * H + 1.0) * cov_bracket(p.a * s, H);
}

double cov_fou_cosine(double s, const FouParams& p) {
    s = std::abs(s);
    const double sig2 = sigma_ou_sq(p);
    if (s == 0.0) return sig2;
    const double H = p.H();
    auto f = [H](double x) { return std::pow(x, 1.0 - 2.0 * H) / (1.0 + x * x); };
    static boost::math::quadrature::ooura_fourier_cos<double> rule(1e-12, 12);
    auto [val, err] = rule.integrate(f, p.a * s);
    if (!(err <= 1e-8 * std::max(1.0, std::abs(val))))
        throw NumericalError("cosine-form covariance did not converge", err);
    return sig2 * 2.0 * std::sin(kPi * H) / kPi * val;
}

double kernel_covariance(double s, const KernelSpec& k) {
    s = std::abs(s);
    const double ts = k.time_scale();
    auto f = [&](double u) { return k(u) * k(u + s); };
    double v = num::integrate(f, 0.0, ts, 1e-12);
    if (s > 0.0) v += num::integrate(f, ts, ts + s, 1e-12);
    v += num::integrate_power_tail(f, ts + s, 1e-12);
    return v;
}

double sigma_z_sq_quadrature(const KernelSpec& k) { return kernel_covariance(0.0, k); }

double kernel_structure(double s, const KernelSpec& k) {
    s = std::abs(s);
    if (s == 0.0) return 0.0;
    const double ts = std::max(k.time_scale(), s);
    auto diff2 = [&](double u) {
        const double d = k(u + s) - k(u);
        return d * d;
    };
    auto sq = [&](double u) {
        const double v = k(u);
        return v * v;
    };
    double v = num::integrate(diff2, 0.0, s, 1e-12);
    v += num::integrate(diff2, s, s + ts, 1e-12);
    v += num::integrate_power_tail(diff2, s + ts, 1e-12);
    v += num::integrate(sq, 0.0, s, 1e-12);
    return 0.5 * v;
}

// ---------------------------------------------------------------------------
// Tail and origin constants

double k_z(const KernelSpec& k) {
    const double H = k.hurst().value();
    if (!(H > 0.5)) throw DomainError("k_Z is defined only for H > 1/2");
    const double c = k.tail_constant();
    return c * c * std::tgamma(2.0 - 2.0 * H) * std::tgamma(H - 0.5) / std::tgamma(1.5 - H);
}

double q_z(const KernelSpec& k) {
    const double H = k.hurst().value();
    if (!(H < 0.5)) throw DomainError("q_Z is defined only for H < 1/2");
    const double d = k.origin_constant();
    const double g = std::tgamma(H + 0.5);
    return 0.5 * d * d * g * g / (std::tgamma(2.0 * H + 1.0) * std::sin(kPi * H));
}

TailConstants tail_constants(const KernelSpec& k) {
    const double H = k.hurst().value();
    TailConstants t;
    if (H > 0.5) t.k_z = k_z(k);
    if (H < 0.5) t.q_z = q_z(k);
    return t;
}

namespace asymptotic {

double kernel_small(double t, const FouParams& p) {
    require_half_excluded(p.hurst, "kernel_small");
    const double H = p.H();
    return std::pow(p.a * t, H - 0.5) / (std::tgamma(H + 0.5) * std::pow(p.a, H - 0.5));
}

double kernel_large(double t, const FouParams& p) {
    require_half_excluded(p.hurst, "kernel_large");
    const double H = p.H();
    return std::pow(p.a * t, H - 1.5) / (std::tgamma(H - 0.5) * std::pow(p.a, H - 0.5));
}

double cov_short(double s, const FouParams& p) {
    require_half_excluded(p.hurst, "cov_short");
    const double H = p.H();
    return sigma_ou_sq(p) * (1.0 - std::pow(p.a * s, 2.0 * H) / std::tgamma(2.0 * H + 1.0));
}

double cov_long(double s, const FouParams& p) {
    require_half_excluded(p.hurst, "cov_long");
    const double H = p.H();
    return sigma_ou_sq(p) * std::pow(p.a * s, 2.0 * H - 2.0) / std::tgamma(2.0 * H - 1.0);
}

double d_small(double tau, const FouParams& p) {
    require_half_excluded(p.hurst, "d_small");
    const double H = p.H();
    return std::pow(p.a * tau, H + 1.5) / (std::tgamma(H + 2.5) * std::pow(p.a, H + 1.5));
}

double d_large(double tau, const FouParams& p) {
    require_half_excluded(p.hurst, "d_large");
    const double H = p.H();
    return std::pow(p.a * tau, H + 0.5) / (std::tgamma(H + 1.5) * std::pow(p.a, H + 1.5));
}

double d_origin(double tau, const KernelSpec& k) {
    const Hurst h = k.hurst();
    require_half_excluded(h, "d_origin");
    const double H = h.value();
    return k.origin_constant() * std::tgamma(H + 0.5) / std::tgamma(H + 2.5) * std::pow(tau, H + 1.5);
}

double d_tail(double tau, const KernelSpec& k) {
    const Hurst h = k.hurst();
    require_half_excluded(h, "d_tail");
    const double H = h.value();
    return k.tail_constant() * std::tgamma(H - 0.5) / std::tgamma(H + 1.5) * std::pow(tau, H + 0.5);
}

}  // namespace asymptotic

}  // namespace fracvol
