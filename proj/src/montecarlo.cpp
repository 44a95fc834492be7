#include "fracvol/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"
#include "fracvol/pricing.hpp"

#include <gsl/gsl_multifit.h>

namespace fracvol {

void McConfig::validate() const {
    if (n_paths < 2) throw ConfigError("Monte Carlo needs at least 2 paths");
    if (antithetic && n_paths % 2 != 0) throw ConfigError("antithetic sampling needs an even path count");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("Monte Carlo dt must be positive");
}

PathGrid McConfig::grid(double t0, double tau) const {
    if (!(tau > 0.0)) throw DomainError("time to maturity must be positive");
    PathGrid g;
    g.t0 = t0;
    g.n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / dt - 1e-9)));
    g.dt = tau / static_cast<double>(g.n_steps);
    g.n_history = n_history;
    g.history_growth = history_growth;
    g.truncation_tol = truncation_tol;
    g.exact_first_cell = exact_first_cell;
    return g;
}

CrnResult::CrnResult(std::size_t n_paths, std::size_t n_variants, std::size_t n_strikes, bool antithetic,
                     std::vector<long> variant_plan, std::size_t n_plans, bool use_controls)
    : n_paths_(n_paths), n_variants_(n_variants), n_strikes_(n_strikes), antithetic_(antithetic),
      variant_plan_(std::move(variant_plan)), use_controls_(use_controls),
      payoff_(n_paths * n_variants * n_strikes),
      controls_(use_controls ? n_paths * (n_common_controls + 2 * n_plans) : 0) {}

std::span<const double> CrnResult::payoffs(std::size_t variant, std::size_t strike) const {
    if (variant >= n_variants_ || strike >= n_strikes_) throw ConfigError("payoff index out of range");
    return {payoff_.data() + (variant * n_strikes_ + strike) * n_paths_, n_paths_};
}

std::vector<std::size_t> CrnResult::control_columns(std::initializer_list<std::size_t> variants) const {
    std::vector<std::size_t> cols;
    if (!use_controls_) return cols;
    cols = {0, 1};
    for (std::size_t v : variants) {
        const long p = variant_plan_[v];
        if (p < 0) continue;
        const std::size_t c = n_common_controls + 2 * static_cast<std::size_t>(p);
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) {
            cols.push_back(c);
            cols.push_back(c + 1);
        }
    }
    return cols;
}

McEstimate CrnResult::summarize(const std::vector<double>& x, const std::vector<std::size_t>& cols) const {
    // antithetic partners are averaged first so the samples are independent
    const std::size_t m = antithetic_ ? x.size() / 2 : x.size();
    auto pair_mean = [&](const double* v, std::size_t i) {
        return antithetic_ ? 0.5 * (v[2 * i] + v[2 * i + 1]) : v[i];
    };
    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) s[i] = pair_mean(x.data(), i);

    if (cols.empty() || m <= cols.size() + 2) {
        const double n = static_cast<double>(m);
        const double mean = num::pairwise_sum(s.data(), m) / n;
        for (double& v : s) v = (v - mean) * (v - mean);
        const double var = num::pairwise_sum(s.data(), m) / (n - 1.0);
        return {mean, std::sqrt(var / n)};
    }

    // y = c + X beta with zero-mean regressors: the intercept is the estimate
    const std::size_t p = cols.size() + 1;
    gsl_matrix* X = gsl_matrix_alloc(m, p);
    gsl_vector* y = gsl_vector_alloc(m);
    gsl_vector* beta = gsl_vector_alloc(p);
    gsl_matrix* cov = gsl_matrix_alloc(p, p);
    gsl_multifit_linear_workspace* ws = gsl_multifit_linear_alloc(m, p);
    for (std::size_t i = 0; i < m; ++i) {
        gsl_vector_set(y, i, s[i]);
        gsl_matrix_set(X, i, 0, 1.0);
        for (std::size_t j = 0; j < cols.size(); ++j)
            gsl_matrix_set(X, i, j + 1, pair_mean(controls_.data() + cols[j] * n_paths_, i));
    }
    double chisq = 0.0;
    const int status = gsl_multifit_linear(X, y, beta, cov, &chisq, ws);
    const McEstimate out{gsl_vector_get(beta, 0), std::sqrt(gsl_matrix_get(cov, 0, 0))};
    gsl_multifit_linear_free(ws);
    gsl_matrix_free(cov);
    gsl_vector_free(beta);
    gsl_vector_free(y);
    gsl_matrix_free(X);
    if (status != 0) throw NumericalError("control-variate regression failed", std::numeric_limits<double>::quiet_NaN());
    return out;
}

McEstimate CrnResult::estimate(std::size_t variant, std::size_t strike) const {
    const auto p = payoffs(variant, strike);
    return summarize(std::vector<double>(p.begin(), p.end()), control_columns({variant}));
}

McEstimate CrnResult::difference(std::size_t v1, std::size_t v2, std::size_t strike) const {
    const auto a = payoffs(v1, strike);
    const auto b = payoffs(v2, strike);
    std::vector<double> d(n_paths_);
    for (std::size_t i = 0; i < n_paths_; ++i) d[i] = a[i] - b[i];
    return summarize(d, control_columns({v1, v2}));
}

struct CrnExperiment::Variant {
    long plan;  ///< index into plans_, -1 for constant volatility
    VolMap vol;
    double rho;
};

CrnExperiment::CrnExperiment(double tau, McConfig cfg, double t0) : cfg_(std::move(cfg)) {
    cfg_.validate();
    grid_ = cfg_.grid(t0, tau);
}

CrnExperiment::~CrnExperiment() = default;
CrnExperiment::CrnExperiment(CrnExperiment&&) noexcept = default;

std::size_t CrnExperiment::plan_for(const KernelSpec& k, double offset) {
    for (std::size_t i = 0; i < plans_.size(); ++i)
        if (plans_[i]->kernel().describe() == k.describe() && plans_[i]->plan().base[0] == offset &&
            cfg_.history != HistoryMode::fixed)
            return i;
    plans_.push_back(std::make_unique<FactorSimulator>(grid_, k, cfg_.history, offset, cfg_.history_dW));
    return plans_.size() - 1;
}

std::size_t CrnExperiment::add(const FsvModel& m) {
    m.validate();
    const long p = static_cast<long>(plan_for(KernelSpec::fou(m.fou), 0.0));
    variants_.push_back({p, VolMap::small_fluctuation(m.sigma_bar, m.f.c, m.delta), m.rho});
    return variants_.size() - 1;
}

std::size_t CrnExperiment::add(const SlowFsvModel& m) {
    m.validate();
    const double offset = cfg_.history == HistoryMode::stationary ? 0.0 : m.z0;
    const long p = static_cast<long>(plan_for(m.kernel(), offset));
    variants_.push_back({p, VolMap::slow(m.f.sigma_min, m.f.c), m.rho});
    return variants_.size() - 1;
}

std::size_t CrnExperiment::add_constant(double sigma, double rho) {
    if (!(sigma > 0.0)) throw DomainError("constant volatility must be positive");
    if (!(std::abs(rho) <= 1.0)) throw DomainError("rho must lie in [-1,1]");
    variants_.push_back({-1, VolMap::constant(sigma), rho});
    return variants_.size() - 1;
}

CrnResult CrnExperiment::run(double x0, const std::vector<double>& strikes) const {
    if (!(x0 > 0.0)) throw DomainError("spot must be positive");
    if (strikes.empty()) throw ConfigError("no strikes requested");
    for (double k : strikes)
        if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("strikes must be nonnegative");
    if (variants_.empty()) throw ConfigError("no model variants added");

    const std::size_t n = grid_.n_steps;
    const double dt = grid_.dt;
    const double tau = dt * static_cast<double>(n);
    const std::size_t n_paths = cfg_.n_paths;
    const std::size_t n_k = strikes.size();
    std::size_t max_hist = 0;
    for (const auto& p : plans_) max_hist = std::max(max_hist, p->plan().n_hist);
    const std::vector<double> unit_sd(max_hist, 1.0);
    const double log_x0 = std::log(x0);
    const bool conditional = cfg_.estimator == Estimator::conditional;

    std::vector<long> variant_plan;
    for (const auto& v : variants_) variant_plan.push_back(v.plan);
    CrnResult out(n_paths, variants_.size(), n_k, cfg_.antithetic, variant_plan, plans_.size(),
                  cfg_.control_variates);
    std::vector<double*> slots;
    for (std::size_t v = 0; v < variants_.size(); ++v)
        for (std::size_t k = 0; k < n_k; ++k) slots.push_back(out.slot(v, k));
    std::vector<double*> ctrl;
    if (cfg_.control_variates)
        for (std::size_t c = 0; c < CrnResult::n_common_controls + 2 * plans_.size(); ++c)
            ctrl.push_back(out.control(c));

    auto body = [&](PathNormals& nrm, std::vector<double>& unit_hist, std::vector<std::vector<double>>& z,
                    std::size_t path) {
        const std::uint64_t stream = cfg_.antithetic ? path / 2 : path;
        const bool negate = cfg_.antithetic && (path % 2 == 1);
        nrm.resize(n, max_hist);
        draw_normals(cfg_.seed, stream, dt, unit_sd, negate, nrm);
        unit_hist = nrm.hist;
        for (std::size_t p = 0; p < plans_.size(); ++p) {
            const FactorPlan& plan = plans_[p]->plan();
            nrm.hist.resize(plan.n_hist);
            for (std::size_t b = 0; b < plan.n_hist; ++b) nrm.hist[b] = unit_hist[b] * plan.hist_sd[b];
            factor_path(plan, nrm, z[p].data());
        }
        const double w_t = num::pairwise_sum(nrm.dW.data(), n);
        if (!ctrl.empty()) {
            ctrl[0][path] = w_t;
            ctrl[1][path] = w_t * w_t - tau;
            for (std::size_t p = 0; p < plans_.size(); ++p) {
                const std::vector<double>& base = plans_[p]->plan().base;
                double i_dt = 0.0, i_dw = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double y = z[p][i] - base[i];
                    i_dt += y;
                    i_dw += y * nrm.dW[i];
                }
                ctrl[CrnResult::n_common_controls + 2 * p][path] = i_dt * dt;
                ctrl[CrnResult::n_common_controls + 2 * p + 1][path] = i_dw;
            }
        }
        for (std::size_t v = 0; v < variants_.size(); ++v) {
            const Variant& var = variants_[v];
            const double* zp = var.plan >= 0 ? z[static_cast<std::size_t>(var.plan)].data() : nullptr;
            // a = int sigma dW, q = int sigma^2 dt along the frozen-volatility steps
            double a = 0.0, q = 0.0;
            if (zp) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double s = var.vol(zp[i]);
                    a += s * nrm.dW[i];
                    q += s * s;
                }
                q *= dt;
            } else {
                a = var.vol.p0 * w_t;
                q = var.vol.p0 * var.vol.p0 * tau;
            }
            if (conditional) {
                // given W, X_T is lognormal around fwd with variance (1 - rho^2) q
                const double fwd = std::exp(log_x0 + var.rho * a - 0.5 * var.rho * var.rho * q);
                const double vol = std::sqrt(std::max(0.0, (1.0 - var.rho * var.rho) * q / tau));
                for (std::size_t k = 0; k < n_k; ++k)
                    slots[v * n_k + k][path] =
                        strikes[k] == 0.0 ? fwd : bs_price(fwd, EuropeanCall{strikes[k], tau}, vol, tau);
            } else {
                double lx;
                if (zp) {
                    lx = evolve_log_price(var.vol, var.rho, dt, zp, nrm.dW.data(), nrm.dB.data(), n, log_x0);
                } else {
                    const double s = var.vol.p0;
                    const double rc = std::sqrt(std::max(0.0, 1.0 - var.rho * var.rho));
                    double w = 0.0;
                    for (std::size_t i = 0; i < n; ++i) w += var.rho * nrm.dW[i] + rc * nrm.dB[i];
                    lx = log_x0 + s * w - 0.5 * s * s * tau;
                }
                const double xt = std::exp(lx);
                for (std::size_t k = 0; k < n_k; ++k) slots[v * n_k + k][path] = std::max(xt - strikes[k], 0.0);
            }
        }
    };

    auto make_z = [&] {
        return std::vector<std::vector<double>>(plans_.size(), std::vector<double>(n + 1));
    };

    if (cfg_.execution == Execution::serial) {
        PathNormals nrm;
        std::vector<double> unit_hist;
        auto z = make_z();
        for (std::size_t path = 0; path < n_paths; ++path) body(nrm, unit_hist, z, path);
    } else {
#pragma omp parallel num_threads(worker_threads())
        {
            PathNormals nrm;
            std::vector<double> unit_hist;
            auto z = make_z();
#pragma omp for schedule(static)
            for (std::size_t path = 0; path < n_paths; ++path) body(nrm, unit_hist, z, path);
        }
    }
    return out;
}

namespace {

template <class Model>
McEstimate price_one(const Model& m, const EuropeanCall& option, const MarketState& state, const McConfig& cfg) {
    if (!(option.strike > 0.0)) throw DomainError("strike must be positive");
    if (!(option.maturity > state.t)) throw DomainError("maturity must exceed the current time");
    CrnExperiment exp(option.maturity - state.t, cfg, state.t);
    exp.add(m);
    return exp.run(state.x, {option.strike}).estimate(0, 0);
}

}  // namespace

McEstimate mc_price(const FsvModel& m, const EuropeanCall& option, const MarketState& state, const McConfig& cfg) {
    return price_one(m, option, state, cfg);
}

McEstimate mc_price(const SlowFsvModel& m, const EuropeanCall& option, const MarketState& state,
                    const McConfig& cfg) {
    return price_one(m, option, state, cfg);
}

}  // namespace fracvol
