#include "fracvol/path_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <omp.h>

#include "fracvol/parallel.hpp"

namespace fracvol {

int worker_threads() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("FRACVOL_THREADS")) {
        char* end = nullptr;
        const long want = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && want > 0 && want <= 1024) n = static_cast<int>(want);
    }
    return n;
}

void PathNormals::resize(std::size_t n_steps, std::size_t n_hist) {
    dW.resize(n_steps);
    dB.resize(n_steps);
    xi.resize(n_steps);
    hist.resize(n_hist);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path_id) {
    return splitmix64(splitmix64(seed) ^ splitmix64(path_id + 0x632BE59BD9B4E019ULL));
}

void draw_normals(std::uint64_t seed, std::uint64_t path_id, double dt, const std::vector<double>& hist_sd,
                  bool negate, PathNormals& out) {
    std::mt19937_64 eng(path_stream_seed(seed, path_id));
    boost::random::normal_distribution<double> normal;
    const double sdt = std::sqrt(dt) * (negate ? -1.0 : 1.0);
    const double sgn = negate ? -1.0 : 1.0;
    for (double& v : out.dW) v = sdt * normal(eng);
    for (double& v : out.dB) v = sdt * normal(eng);
    for (double& v : out.xi) v = sgn * normal(eng);
    for (std::size_t b = 0; b < out.hist.size(); ++b) out.hist[b] = sgn * hist_sd[b] * normal(eng);
    out.xi_h = sgn * normal(eng);
}

void factor_path(const FactorPlan& plan, const PathNormals& nrm, double* z) {
    const std::size_t n = plan.n_steps;
    const double* kb = plan.kbar.data();
    for (std::size_t i = 0; i <= n; ++i) z[i] = plan.base[i];
    if (plan.n_hist > 0) {
        const double* h = nrm.hist.data();
        for (std::size_t i = 0; i <= n; ++i) {
            const double* w = plan.hist_weights.data() + i * plan.n_hist;
            double acc = 0.0;
#pragma omp simd reduction(+ : acc)
            for (std::size_t b = 0; b < plan.n_hist; ++b) acc += w[b] * h[b];
            z[i] += acc;
        }
        z[0] += plan.xi_coeff * nrm.xi_h;
    }
    // scatter each increment forward along the kernel: contiguous, vectorizes
    for (std::size_t j = 0; j < n; ++j) {
        const double dw = nrm.dW[j];
        double* zt = z + j + 1;
        const std::size_t len = n - j;
#pragma omp simd
        for (std::size_t k = 0; k < len; ++k) zt[k] += kb[k] * dw;
        zt[0] += plan.xi_coeff * nrm.xi[j];
    }
}

void factor_path_reference(const FactorPlan& plan, const PathNormals& nrm, double* z) {
    const std::size_t n = plan.n_steps;
    for (std::size_t i = 0; i <= n; ++i) {
        double acc = plan.base[i];
        for (std::size_t b = 0; b < plan.n_hist; ++b)
            acc += plan.hist_weights[i * plan.n_hist + b] * nrm.hist[b];
        if (i == 0 && plan.n_hist > 0) acc += plan.xi_coeff * nrm.xi_h;
        for (std::size_t m = 1; m <= i; ++m) acc += plan.kbar[m - 1] * nrm.dW[i - m];
        if (i > 0) acc += plan.xi_coeff * nrm.xi[i - 1];
        z[i] = acc;
    }
}

double VolMap::operator()(double z) const {
    switch (kind) {
        case Kind::small_fluctuation: return p0 + p1 * std::tanh(p2 * z / p1);
        case Kind::slow: return p0 + p1 * (1.0 + std::tanh(z));
        case Kind::constant: break;
    }
    return p0;
}

double evolve_log_price(const VolMap& vol, double rho, double dt, const double* z, const double* dW,
                        const double* dB, std::size_t n, double log_x0, double* sigma_out, double* x_out) {
    const double rc = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    double lx = log_x0;
    if (x_out) x_out[0] = std::exp(lx);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = vol(z[i]);
        if (sigma_out) sigma_out[i] = s;
        lx += s * (rho * dW[i] + rc * dB[i]) - 0.5 * s * s * dt;
        if (x_out) x_out[i + 1] = std::exp(lx);
    }
    if (sigma_out) sigma_out[n] = vol(z[n]);
    return lx;
}

}  // namespace fracvol
