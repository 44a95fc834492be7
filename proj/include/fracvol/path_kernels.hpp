#pragma once
/// @file path_kernels.hpp
/// Per-path building blocks of the simulator: normal draws, the discrete
/// moving-average convolution that produces the factor path, and the
/// log-Euler asset update. Everything here is allocation-free once the
/// buffers are sized, so the Monte Carlo loop can run one path per call.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fracvol {

/// Precomputed, read-only weights for Z at the grid nodes t_0..t_n:
///   Z_i = base_i + sum_{m=1..i} kbar[m-1] dW_{i-m} + xi_coeff xi_{i-1}
///         + sum_b hist_weights[i][b] dWh_b  (+ xi_coeff xi_h at i = 0)
/// where dWh_b ~ N(0, width_b) are past increments (stationary mode only).
struct FactorPlan {
    std::size_t n_steps = 0;
    std::size_t n_hist = 0;          ///< number of random past cells (0 unless stationary)
    std::vector<double> kbar;        ///< cell averages of K over [(m-1)dt, m dt]
    double xi_coeff = 0.0;           ///< sqrt(int_0^dt K^2 - theta(dt)^2/dt)
    std::vector<double> hist_sd;     ///< sqrt(width) of each past cell
    std::vector<double> hist_weights;  ///< (n_steps+1) x n_hist, row-major
    std::vector<double> base;        ///< deterministic part, size n_steps+1
};

/// Standard normals for one path, scaled to increments where noted.
struct PathNormals {
    std::vector<double> dW;    ///< sqrt(dt) N(0,1)
    std::vector<double> dB;    ///< sqrt(dt) N(0,1)
    std::vector<double> xi;    ///< N(0,1), one per live cell
    std::vector<double> hist;  ///< sqrt(width_b) N(0,1) per past cell
    double xi_h = 0.0;

    void resize(std::size_t n_steps, std::size_t n_hist);
};

/// Seed of the independent stream for (seed, path_id).
std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path_id);

/// Fills the buffers in a fixed order: dW, dB, xi, then the history block.
/// With `negate` the same stream is used with every draw sign-flipped
/// (the antithetic partner).
void draw_normals(std::uint64_t seed, std::uint64_t path_id, double dt, const std::vector<double>& hist_sd,
                  bool negate, PathNormals& out);

/// Factor path from the normals; z must hold n_steps+1 values.
void factor_path(const FactorPlan& plan, const PathNormals& nrm, double* z);

/// Straightforward gather form of the same sum, kept as the reference the
/// optimized version is tested against.
void factor_path_reference(const FactorPlan& plan, const PathNormals& nrm, double* z);

/// Volatility as a function of the factor value.
struct VolMap {
    enum class Kind { small_fluctuation, slow, constant };
    Kind kind = Kind::constant;
    double p0 = 0.0;  ///< sigma_bar | sigma_min | sigma
    double p1 = 0.0;  ///< c         | c         | unused
    double p2 = 0.0;  ///< delta     | unused    | unused

    static VolMap small_fluctuation(double sigma_bar, double c, double delta) {
        return {Kind::small_fluctuation, sigma_bar, c, delta};
    }
    static VolMap slow(double sigma_min, double c) { return {Kind::slow, sigma_min, c, 0.0}; }
    static VolMap constant(double sigma) { return {Kind::constant, sigma, 0.0, 0.0}; }
    double operator()(double z) const;
};

/// log X_T after n frozen-volatility lognormal steps with
/// dW* = rho dW + sqrt(1-rho^2) dB. Fills the per-node arrays when given.
double evolve_log_price(const VolMap& vol, double rho, double dt, const double* z, const double* dW,
                        const double* dB, std::size_t n, double log_x0, double* sigma_out = nullptr,
                        double* x_out = nullptr);

}  // namespace fracvol
