#include "fracvol/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"
#include "fracvol/parallel.hpp"

namespace fracvol {

void FitConfig::validate() const {
    auto check = [](const ParamBounds& b, const char* name) {
        if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi))
            throw ConfigError(std::string("bounds for ") + name + " must satisfy lo < hi");
    };
    check(sigma_bar, "sigma_bar");
    check(hurst, "hurst");
    check(delta_rho, "delta_rho");
    check(a, "a");
    if (!(sigma_bar.lo > 0.0)) throw ConfigError("sigma_bar lower bound must be positive");
    if (!(hurst.lo > 0.0 && hurst.hi < 1.0)) throw ConfigError("hurst bounds must lie inside (0,1)");
    if (!(a.lo > 0.0)) throw ConfigError("a lower bound must be positive");
    if (!(tol > 0.0)) throw ConfigError("fit tolerance must be positive");
    if (n_starts < 1) throw ConfigError("at least one start is needed");
    if (max_iter < 1) throw ConfigError("max_iter must be positive");
}

std::vector<MaturitySlice> regress_slices(const VolSurface& s, WeightRule rule) {
    std::map<double, std::vector<const VolPoint*>> by_tau;
    for (const VolPoint& p : s.points) by_tau[p.tau].push_back(&p);
    std::vector<MaturitySlice> out;
    for (const auto& [tau, pts] : by_tau) {
        MaturitySlice sl{};
        sl.tau = tau;
        sl.n = pts.size();
        const double n = static_cast<double>(sl.n);
        double mm = 0.0, mi = 0.0;
        for (const VolPoint* p : pts) {
            mm += p->log_moneyness;
            mi += p->iv;
        }
        mm /= n;
        mi /= n;
        double smm = 0.0, smi = 0.0;
        for (const VolPoint* p : pts) {
            smm += (p->log_moneyness - mm) * (p->log_moneyness - mm);
            smi += (p->log_moneyness - mm) * (p->iv - mi);
        }
        sl.mean_m = mm;
        sl.s_mm = smm;
        sl.slope = smm > 0.0 ? smi / smm : 0.0;
        sl.level = mi - sl.slope * mm;
        double rss = 0.0;
        for (const VolPoint* p : pts) {
            const double r = p->iv - sl.level - sl.slope * p->log_moneyness;
            rss += r * r;
        }
        sl.rss = rss;
        sl.slope_se = (sl.n > 2 && smm > 0.0) ? std::sqrt(rss / (n - 2.0) / smm) : 0.0;
        sl.weight = rule == WeightRule::inverse_tau ? 1.0 / tau : 1.0;
        out.push_back(sl);
    }
    return out;
}

namespace {

struct SliceModel {
    double g;  // level shift per unit delta_rho: sigma_bar D / (2 tau)
    double h;  // slope per unit delta_rho: D / (sigma_bar tau^2)
};

double slice_terms(const MaturitySlice& s, double sigma_bar, double dr, const SliceModel& m) {
    const double d_level = sigma_bar + dr * m.g - s.level;
    const double d_slope = dr * m.h - s.slope;
    const double at_mean = d_level + d_slope * s.mean_m;
    return s.weight * (static_cast<double>(s.n) * at_mean * at_mean + s.s_mm * d_slope * d_slope + s.rss);
}

std::vector<SliceModel> slice_models(const std::vector<MaturitySlice>& slices, double sigma_bar, double H,
                                     double a) {
    const FouParams p(H, a);
    std::vector<SliceModel> out;
    out.reserve(slices.size());
    for (const auto& s : slices) {
        const double D = d_function(s.tau, p);
        out.push_back({sigma_bar * D / (2.0 * s.tau), D / (sigma_bar * s.tau * s.tau)});
    }
    return out;
}

// exact minimizer over delta_rho of the quadratic objective, clamped to bounds
double profile_delta_rho(const std::vector<MaturitySlice>& slices, const std::vector<SliceModel>& models,
                         double sigma_bar, const ParamBounds& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        const auto& s = slices[i];
        const auto& m = models[i];
        const double n = static_cast<double>(s.n);
        const double c1 = sigma_bar - s.level - s.slope * s.mean_m;
        const double e1 = m.g + m.h * s.mean_m;
        num += s.weight * (s.s_mm * m.h * s.slope - n * e1 * c1);
        den += s.weight * (n * e1 * e1 + s.s_mm * m.h * m.h);
    }
    const double dr = den > 0.0 ? num / den : 0.0;
    return std::clamp(dr, b.lo, b.hi);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double to_bounded(double x, const ParamBounds& b) { return b.lo + (b.hi - b.lo) * logistic(x); }
double from_bounded(double v, const ParamBounds& b) {
    const double u = (v - b.lo) / (b.hi - b.lo);
    return std::log(u / (1.0 - u));
}

struct Problem {
    const std::vector<MaturitySlice>* slices;
    const FitConfig* cfg;
    ParamBounds log_a;
};

struct Point {
    double sigma_bar, hurst, a, delta_rho, value;
};

Point evaluate(const Problem& pb, double x0, double x1, double x2) {
    Point p;
    p.sigma_bar = to_bounded(x0, pb.cfg->sigma_bar);
    p.hurst = to_bounded(x1, pb.cfg->hurst);
    p.a = std::exp(to_bounded(x2, pb.log_a));
    const auto models = slice_models(*pb.slices, p.sigma_bar, p.hurst, p.a);
    p.delta_rho = profile_delta_rho(*pb.slices, models, p.sigma_bar, pb.cfg->delta_rho);
    double v = 0.0;
    for (std::size_t i = 0; i < pb.slices->size(); ++i)
        v += slice_terms((*pb.slices)[i], p.sigma_bar, p.delta_rho, models[i]);
    p.value = v;
    return p;
}

double gsl_objective(const gsl_vector* x, void* params) {
    const auto* pb = static_cast<const Problem*>(params);
    try {
        return evaluate(*pb, gsl_vector_get(x, 0), gsl_vector_get(x, 1), gsl_vector_get(x, 2)).value;
    } catch (const Error&) {
        // a failed kernel evaluation is treated as an infeasible point
        return std::numeric_limits<double>::max();
    }
}

struct StartResult {
    Point best{};
    bool converged = false;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

StartResult run_start(const Problem& pb, double sigma0, double h0, double a0) {
    gsl_multimin_function fn{&gsl_objective, 3, const_cast<Problem*>(&pb)};
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, from_bounded(sigma0, pb.cfg->sigma_bar));
    gsl_vector_set(x, 1, from_bounded(h0, pb.cfg->hurst));
    gsl_vector_set(x, 2, from_bounded(std::log(a0), pb.log_a));
    gsl_vector_set_all(step, 0.5);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    StartResult r;
    for (std::size_t it = 0; it < pb.cfg->max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        r.iterations = it + 1;
        r.trace.push_back(s->fval);
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), pb.cfg->tol) == GSL_SUCCESS) {
            r.converged = true;
            break;
        }
    }
    const gsl_vector* xm = gsl_multimin_fminimizer_x(s);
    r.best = evaluate(pb, gsl_vector_get(xm, 0), gsl_vector_get(xm, 1), gsl_vector_get(xm, 2));
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(step);
    return r;
}

}  // namespace

double surface_objective(const std::vector<MaturitySlice>& slices, double sigma_bar, double hurst,
                         double delta_rho, double a) {
    const auto models = slice_models(slices, sigma_bar, hurst, a);
    double v = 0.0;
    for (std::size_t i = 0; i < slices.size(); ++i) v += slice_terms(slices[i], sigma_bar, delta_rho, models[i]);
    return v;
}

CalibratedParams fit_params(const VolSurface& surface, const FitConfig& cfg) {
    cfg.validate();
    surface.validate();
    const auto slices = regress_slices(surface, cfg.weights);
    if (slices.size() < 2)
        throw UnderIdentifiedError("a single maturity cannot separate the term-structure parameters",
                                   {"hurst", "a"});
    for (const auto& s : slices) {
        if (s.s_mm <= 0.0) {
            std::ostringstream os;
            os << "maturity " << s.tau << " has fewer than two log-moneyness levels";
            throw UnderIdentifiedError(os.str(), {"skew slope at tau=" + std::to_string(s.tau)});
        }
    }

    CalibratedParams out{};
    out.slices = slices;
    bool any_skew = false;
    for (const auto& s : slices) {
        const double spread = std::sqrt(s.s_mm / static_cast<double>(s.n));
        if (std::abs(s.slope) > 3.0 * s.slope_se && std::abs(s.slope) * spread > 1e-10) any_skew = true;
    }
    out.flags.skew_absent = !any_skew;
    out.flags.hurst_unidentified = !any_skew;
    out.flags.a_unidentified = !any_skew;

    double wsum = 0.0, lsum = 0.0;
    for (const auto& s : slices) {
        wsum += s.weight;
        lsum += s.weight * s.level;
    }
    const double sigma0 = std::clamp(lsum / wsum, cfg.sigma_bar.lo + 1e-3 * (cfg.sigma_bar.hi - cfg.sigma_bar.lo),
                                     cfg.sigma_bar.hi - 1e-3 * (cfg.sigma_bar.hi - cfg.sigma_bar.lo));

    const Problem pb{&slices, &cfg, {std::log(cfg.a.lo), std::log(cfg.a.hi)}};

    // centred Latin hypercube over (H, log a)
    const std::size_t n = cfg.n_starts;
    std::vector<std::size_t> ph(n), pa(n);
    std::iota(ph.begin(), ph.end(), 0);
    std::iota(pa.begin(), pa.end(), 0);
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(ph.begin(), ph.end(), rng);
    std::shuffle(pa.begin(), pa.end(), rng);
    std::vector<StartResult> results(n);
    const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
    for (long i = 0; i < ln; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double uh = (static_cast<double>(ph[k]) + 0.5) / static_cast<double>(n);
        const double ua = (static_cast<double>(pa[k]) + 0.5) / static_cast<double>(n);
        const double h0 = cfg.hurst.lo + uh * (cfg.hurst.hi - cfg.hurst.lo);
        const double a0 = std::exp(pb.log_a.lo + ua * (pb.log_a.hi - pb.log_a.lo));
        results[k] = run_start(pb, sigma0, h0, a0);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (results[i].best.value < results[best].best.value) best = i;
    const StartResult& r = results[best];

    out.sigma_bar = r.best.sigma_bar;
    out.hurst = Hurst(r.best.hurst);
    out.delta_rho = r.best.delta_rho;
    out.a = r.best.a;
    out.objective = r.best.value;
    out.objective_trace = r.trace;
    out.converged = r.converged;
    out.best_start = best;
    out.iterations = r.iterations;

    const FouParams fitted(out.hurst, out.a);
    for (const auto& s : slices) {
        const double D = d_function(s.tau, fitted);
        out.effective_vol_curve.emplace_back(s.tau, s.level - out.delta_rho * out.sigma_bar * D / (2.0 * s.tau));
        if (out.a * s.tau <= 0.1) ++out.flags.n_short_regime;
        if (out.a * s.tau >= 10.0) ++out.flags.n_long_regime;
    }
    std::map<double, double> d_cache;
    double ss = 0.0;
    for (const VolPoint& p : surface.points) {
        auto it = d_cache.find(p.tau);
        if (it == d_cache.end()) it = d_cache.emplace(p.tau, d_function(p.tau, fitted)).first;
        const double D = it->second;
        const double model = out.sigma_bar + out.delta_rho * out.sigma_bar * D / (2.0 * p.tau) +
                             out.delta_rho * D / (out.sigma_bar * p.tau * p.tau) * p.log_moneyness;
        out.residuals.push_back(model - p.iv);
        ss += (model - p.iv) * (model - p.iv);
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(surface.points.size()));
    return out;
}

SkewExponentFit fit_hurst_from_skew(const std::vector<SkewPoint>& slopes, double a, double short_limit,
                                    double long_limit) {
    if (!(a > 0.0)) throw DomainError("mean-reversion rate must be positive");
    if (!(short_limit > 0.0 && long_limit > short_limit)) throw DomainError("regime limits must be ordered");
    std::vector<double> xs, ys, xl, yl;
    for (const auto& p : slopes) {
        if (!(p.tau > 0.0) || !(std::abs(p.slope) > 0.0) || !std::isfinite(p.slope)) continue;
        if (a * p.tau <= short_limit) {
            xs.push_back(std::log(p.tau));
            ys.push_back(std::log(std::abs(p.slope)));
        } else if (a * p.tau >= long_limit) {
            xl.push_back(std::log(p.tau));
            yl.push_back(std::log(std::abs(p.slope)));
        }
    }
    SkewExponentFit out;
    out.n_short = xs.size();
    out.n_long = xl.size();
    if (xs.size() < 4 && xl.size() < 4) {
        std::ostringstream os;
        os << "need at least 4 maturities in one regime (short: " << xs.size() << ", long: " << xl.size() << ")";
        throw UnderIdentifiedError(os.str(), {"short-maturity exponent", "long-maturity exponent"});
    }
    if (xs.size() >= 4) {
        out.short_exponent = num::fit_line(xs.data(), ys.data(), xs.size()).slope;
        out.hurst_short = *out.short_exponent + 0.5;
    }
    if (xl.size() >= 4) {
        out.long_exponent = num::fit_line(xl.data(), yl.data(), xl.size()).slope;
        out.hurst_long = *out.long_exponent + 1.5;
    }
    return out;
}

}  // namespace fracvol
