#pragma once
/// @file kernel.hpp
/// Moving-average kernel mathematics for the fractional Ornstein-Uhlenbeck
/// factor Z = int K(t-s) dW_s and for general stationary Gaussian kernels.
///
/// The fOU kernel and its first two primitives share one representation,
///   G_b(tau) = tau^b / Gamma(b+1) * M(1, b+1, -a tau),
/// with b = H-1/2 (K), H+1/2 (theta) and H+3/2 (D). The confluent
/// hypergeometric factor is evaluated by double-exponential quadrature.

#include <optional>
#include <string>
#include <variant>

namespace fracvol {

class Hurst {
public:
    explicit Hurst(double h);
    double value() const noexcept { return h_; }
    bool is_half() const noexcept { return h_ == 0.5; }

private:
    double h_;
};

struct FouParams {
    FouParams(Hurst h, double a);
    FouParams(double h, double a) : FouParams(Hurst(h), a) {}
    Hurst hurst;
    double a;
    double H() const noexcept { return hurst.value(); }
};

/// K(t) = d_Z t^(H-1/2) e^(-a t): a pure power law near the origin with an
/// exponential cutoff, so it has no long-range tail.
struct CutoffKernel {
    Hurst hurst;
    double d_z;
    double a;
};

class KernelSpec {
public:
    static KernelSpec fou(const FouParams& p);
    static KernelSpec power_law_cutoff(Hurst h, double d_z, double a);

    /// delta^(1/2) K(delta t): the slow-factor kernel, same stationary variance.
    KernelSpec time_dilated(double delta) const;

    double operator()(double t) const;      ///< K(t), t > 0
    double primitive(double tau) const;      ///< theta(tau) = int_0^tau K
    double second_primitive(double tau) const;  ///< D(tau) = int_0^tau theta

    Hurst hurst() const;
    double sigma_z_sq() const;  ///< int_0^inf K^2, closed form
    /// c_Z in K(t) ~ c_Z t^(H-3/2) at infinity (zero for exponential tails).
    double tail_constant() const;
    /// d_Z in K(t) ~ d_Z t^(H-1/2) at the origin.
    double origin_constant() const;
    /// Natural time scale, used to place quadrature breakpoints.
    double time_scale() const;

    /// Set when the kernel is an undilated fOU kernel.
    std::optional<FouParams> fou_params() const;
    std::string describe() const;

private:
    using Base = std::variant<FouParams, CutoffKernel>;
    explicit KernelSpec(Base b) : base_(std::move(b)) {}
    Base base_;
    double amp_ = 1.0;
    double scale_ = 1.0;
};

double sigma_h_sq(Hurst h);
double kernel_fou(double t, const FouParams& p);
double sigma_ou_sq(const FouParams& p);
double theta(double tau, const KernelSpec& k);
double theta_fou(double tau, const FouParams& p);
double d_function(double tau, const FouParams& p);

/// D(tau) = int_0^tau (tau-u) K(u) du by direct quadrature of kernel values
/// only; an oracle independent of the closed-form primitives.
double d_function_quadrature(double tau, const KernelSpec& k);

/// Var(phi) = int_0^inf (theta(u+tau) - theta(u))^2 du. Uses the closed form
/// for the classical (H = 1/2) fOU kernel.
double phi_variance(double tau, const KernelSpec& k);
/// Same quantity, always by quadrature.
double phi_variance_quadrature(double tau, const KernelSpec& k);

/// Stationary covariance E[Z_t Z_{t+s}] of the fOU process.
double cov_fou(double s, const FouParams& p);
/// The same covariance through its cosine-transform representation.
double cov_fou_cosine(double s, const FouParams& p);

/// int_0^inf K(u) K(u+s) du for any kernel.
double kernel_covariance(double s, const KernelSpec& k);
/// C(0) - C(s), evaluated without cancellation for small s.
double kernel_structure(double s, const KernelSpec& k);
/// int_0^inf K^2 by quadrature.
double sigma_z_sq_quadrature(const KernelSpec& k);

/// Long-range constant k_Z (requires H > 1/2) and short-range constant q_Z
/// (requires H < 1/2).
double k_z(const KernelSpec& k);
double q_z(const KernelSpec& k);
struct TailConstants {
    std::optional<double> k_z;
    std::optional<double> q_z;
};
TailConstants tail_constants(const KernelSpec& k);

/// Leading-order asymptotes of the fOU kernel quantities. All reject H = 1/2
/// where the constants involve Gamma(H-1/2).
namespace asymptotic {
double kernel_small(double t, const FouParams& p);   // a t << 1
double kernel_large(double t, const FouParams& p);   // a t >> 1
double cov_short(double s, const FouParams& p);      // a s << 1, H < 1/2
double cov_long(double s, const FouParams& p);       // a s >> 1
double d_small(double tau, const FouParams& p);      // a tau << 1
double d_large(double tau, const FouParams& p);      // a tau >> 1
/// General kernel: D ~ d_Z Gamma(H+1/2)/Gamma(H+5/2) tau^(H+3/2) near 0.
double d_origin(double tau, const KernelSpec& k);
/// General kernel: D ~ c_Z Gamma(H-1/2)/Gamma(H+3/2) tau^(H+1/2) at infinity.
double d_tail(double tau, const KernelSpec& k);
}  // namespace asymptotic

namespace detail {
/// M(1, b+1, -x) for b > -1, x >= 0.
double kummer_bracket(double b, double x);
}  // namespace detail

}  // namespace fracvol
