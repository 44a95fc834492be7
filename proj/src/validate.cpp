#include "fracvol/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

#include <gsl/gsl_fit.h>

#include "fracvol/errors.hpp"
#include "fracvol/implied_vol.hpp"
#include "fracvol/numerics.hpp"
#include "fracvol/parallel.hpp"
#include "fracvol/pricing.hpp"
#include "fracvol/serialize.hpp"
#include "fracvol/simulate.hpp"

namespace fracvol {

Criterion Criterion::within(std::string name, double measured, double target, double tolerance) {
    const bool pass = std::isfinite(measured) && std::abs(measured - target) <= tolerance;
    return {std::move(name), measured, target, tolerance, pass};
}

Criterion Criterion::in_range(std::string name, double measured, double lo, double hi) {
    const bool pass = std::isfinite(measured) && measured >= lo && measured <= hi;
    return {std::move(name), measured, 0.5 * (lo + hi), 0.5 * (hi - lo), pass};
}

bool ExperimentReport::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

namespace {

// NaN has no JSON spelling; it is written as null and read back as NaN.
Json num_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
double null_or_num(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

Json ExperimentReport::to_json(bool with_runtime) const {
    Json j;
    j["experiment"] = id;
    j["passed"] = passed();
    j["parameters"] = parameters;
    Json crit = Json::array();
    for (const auto& c : criteria)
        crit.push_back(Json{{"name", c.name},
                            {"pass", c.pass},
                            {"measured", num_or_null(c.measured)},
                            {"target", c.target},
                            {"tolerance", c.tolerance}});
    j["criteria"] = std::move(crit);
    j["cells"] = cells;
    if (with_runtime) j["runtime_seconds"] = runtime_seconds;
    return j;
}

ExperimentReport ExperimentReport::from_json(const Json& j) {
    try {
        ExperimentReport r;
        r.id = j.at("experiment").get<std::string>();
        r.parameters = j.at("parameters");
        for (const auto& c : j.at("cells")) r.cells.push_back(c);
        for (const auto& c : j.at("criteria"))
            r.criteria.push_back({c.at("name").get<std::string>(), null_or_num(c.at("measured")),
                                  c.at("target").get<double>(), c.at("tolerance").get<double>(),
                                  c.at("pass").get<bool>()});
        if (j.contains("runtime_seconds")) r.runtime_seconds = j.at("runtime_seconds").get<double>();
        return r;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("malformed experiment report: ") + e.what(), 0, "");
    }
}

ConvergenceTargets default_targets(const FsvModel&) {
    return {.exponent = 2.0, .exponent_tol = 0.3, .ratio_range = std::pair{3.0, 5.5}};
}

ConvergenceTargets default_targets(const SlowFsvModel& m) {
    return {.exponent = 2.0 * m.fou.H(), .exponent_tol = 0.3, .ratio_range = std::nullopt};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct LineFit {
    double slope;
    double slope_se;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    double c0, c1, cov00, cov01, cov11, sumsq;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
    return {c1, std::sqrt(cov11)};
}

LineFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(y[i] > 0.0 ? std::log(y[i]) : std::numeric_limits<double>::quiet_NaN());
    }
    if (lx.size() < 2) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    if (lx.size() == 2) return {(ly[1] - ly[0]) / (lx[1] - lx[0]), 0.0};
    return fit_line(lx, ly);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// One model family plugged into the shared error-order study.
struct ConvergenceSetup {
    std::string id;
    Json model;
    std::vector<double> deltas;  // positive ones, ascending
    bool control_in_grid;        // delta = 0 was requested explicitly
    std::function<std::size_t(CrnExperiment&)> add_control;
    std::function<std::size_t(CrnExperiment&, double)> add_variant;
    std::function<double(double)> analytic_correction;  // price minus q0
    double q0;
};

ExperimentReport convergence_study(const ConvergenceSetup& s, const EuropeanCall& option, McConfig cfg,
                                   const ConvergenceTargets& tg) {
    const auto t0 = Clock::now();
    if (s.deltas.size() < 2) throw ConfigError("an error-order study needs at least two positive deltas");
    const std::size_t requested = cfg.n_paths;
    const std::size_t budget = tg.max_paths > 0 ? tg.max_paths : 4 * cfg.n_paths;
    if (budget < requested) throw ConfigError("path budget is below the configured path count");

    std::vector<double> analytic;
    for (double d : s.deltas) analytic.push_back(s.analytic_correction(d));

    struct Row {
        McEstimate diff;
        double err;
    };
    std::vector<Row> rows;
    McEstimate control{};
    while (true) {
        CrnExperiment ex(option.maturity, cfg);
        const std::size_t c = s.add_control(ex);
        std::vector<std::size_t> ids;
        for (double d : s.deltas) ids.push_back(s.add_variant(ex, d));
        const CrnResult r = ex.run(1.0, {option.strike});
        control = r.estimate(c, 0);
        rows.clear();
        bool resolved = true;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const McEstimate d = r.difference(ids[i], c, 0);
            const double err = std::abs(d.value - analytic[i]);
            rows.push_back({d, err});
            if (!(d.standard_error <= tg.se_fraction * err)) resolved = false;
        }
        if (resolved) break;
        if (2 * cfg.n_paths > budget) {
            std::ostringstream os;
            os << s.id << ": Monte Carlo error not resolved to " << tg.se_fraction << " of err within " << budget
               << " paths;";
            for (std::size_t i = 0; i < rows.size(); ++i)
                os << " delta " << s.deltas[i] << " se/err " << rows[i].diff.standard_error / rows[i].err;
            throw BudgetError(os.str());
        }
        cfg.n_paths *= 2;
    }

    ExperimentReport rep;
    rep.id = s.id;
    rep.parameters = Json{{"model", s.model},
                          {"option", {{"strike", option.strike}, {"maturity", option.maturity}, {"spot", 1.0}}},
                          {"deltas", s.deltas},
                          {"mc", to_json(cfg)},
                          {"paths_requested", requested},
                          {"path_budget", budget},
                          {"se_fraction", tg.se_fraction}};

    const double control_z = std::abs(control.value - s.q0) / control.standard_error;
    rep.cells.push_back(Json{{"delta", 0.0},
                             {"role", "control"},
                             {"mc_price", control.value},
                             {"mc_se", control.standard_error},
                             {"reference_price", s.q0},
                             {"err", std::abs(control.value - s.q0)}});
    std::vector<double> errs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rep.cells.push_back(Json{{"delta", s.deltas[i]},
                                 {"mc_difference", rows[i].diff.value},
                                 {"mc_se", rows[i].diff.standard_error},
                                 {"analytic_correction", analytic[i]},
                                 {"err", rows[i].err}});
        errs.push_back(rows[i].err);
    }

    rep.criteria.push_back(Criterion::within("control_within_3se", control_z, 0.0, 3.0));
    const LineFit fit = log_log_fit(s.deltas, errs);
    rep.criteria.push_back(Criterion::within("error_exponent", fit.slope, tg.exponent, tg.exponent_tol));
    rep.parameters["error_exponent_se"] = fit.slope_se;
    if (tg.ratio_range) {
        auto at = [&](double d) -> std::optional<double> {
            for (std::size_t i = 0; i < s.deltas.size(); ++i)
                if (std::abs(s.deltas[i] - d) < 1e-12) return errs[i];
            return std::nullopt;
        };
        const auto e1 = at(0.1), e2 = at(0.2);
        if (e1 && e2)
            rep.criteria.push_back(
                Criterion::in_range("err_ratio_0.2_over_0.1", *e2 / *e1, tg.ratio_range->first, tg.ratio_range->second));
    }
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

std::vector<double> positive_sorted(const std::vector<double>& deltas, bool& had_zero, bool allow_zero) {
    std::vector<double> out;
    had_zero = false;
    for (double d : deltas) {
        if (d == 0.0 && allow_zero) {
            had_zero = true;
            continue;
        }
        if (!(d > 0.0 && d < 1.0)) throw DomainError("deltas must lie in (0,1), got " + fmt(d));
        out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ConfigError("duplicate delta");
    return out;
}

}  // namespace

ExperimentReport run_delta_convergence(const FsvModel& tmpl, const EuropeanCall& option,
                                       const std::vector<double>& deltas, McConfig cfg,
                                       std::optional<ConvergenceTargets> targets) {
    tmpl.validate();
    const MarketState state{};
    ConvergenceSetup s;
    s.id = "delta_convergence_fsv_h" + fmt(tmpl.fou.H());
    s.model = to_json(tmpl);
    s.model.erase("delta");
    s.deltas = positive_sorted(deltas, s.control_in_grid, true);
    auto with_delta = [&](double d) {
        FsvModel m = tmpl;
        m.delta = d;
        return m;
    };
    s.add_control = [&](CrnExperiment& ex) { return ex.add(with_delta(0.0)); };
    s.add_variant = [&](CrnExperiment& ex, double d) { return ex.add(with_delta(d)); };
    s.analytic_correction = [&](double d) {
        const PriceBreakdown p = corrected_price(with_delta(d), option, state);
        return p.total - p.q0;
    };
    s.q0 = bs_price(state.x, option, tmpl.sigma_bar, option.maturity - state.t);
    return convergence_study(s, option, std::move(cfg), targets.value_or(default_targets(tmpl)));
}

ExperimentReport run_delta_convergence(const SlowFsvModel& tmpl, const EuropeanCall& option,
                                       const std::vector<double>& deltas, McConfig cfg,
                                       std::optional<ConvergenceTargets> targets) {
    const MarketState state{};
    ConvergenceSetup s;
    s.id = "delta_convergence_slow_h" + fmt(tmpl.fou.H());
    s.model = to_json(tmpl);
    s.model.erase("delta");
    s.deltas = positive_sorted(deltas, s.control_in_grid, false);
    auto with_delta = [&](double d) {
        SlowFsvModel m = tmpl;
        m.delta = d;
        m.validate();
        return m;
    };
    with_delta(s.deltas.front());
    s.add_control = [&](CrnExperiment& ex) { return ex.add_constant(tmpl.sigma0(), tmpl.rho); };
    s.add_variant = [&](CrnExperiment& ex, double d) { return ex.add(with_delta(d)); };
    s.analytic_correction = [&](double d) {
        const PriceBreakdown p = slow_corrected_price(with_delta(d), option, state);
        return p.total - p.q0;
    };
    s.q0 = bs_price(state.x, option, tmpl.sigma0(), option.maturity - state.t);
    return convergence_study(s, option, std::move(cfg), targets.value_or(default_targets(tmpl)));
}

ExperimentReport run_skew_powerlaw(const FsvModel& m, const std::vector<double>& tau_grid, McConfig cfg,
                                   const SkewOptions& opt) {
    const auto t0 = Clock::now();
    m.validate();
    if (tau_grid.size() < 2) throw ConfigError("skew power law needs at least two maturities");
    if (opt.strikes_per_side < 1 || !(opt.strike_step > 0.0) || opt.steps_per_min_tau < 1)
        throw ConfigError("invalid skew strike layout");
    std::vector<double> taus = tau_grid;
    std::sort(taus.begin(), taus.end());
    for (double t : taus)
        if (!(t > 0.0)) throw DomainError("maturities must be positive");
    const double a = m.fou.a;
    const double H = m.fou.H();
    if (taus.back() / taus.front() < 10.0 * (1.0 - 1e-12))
        throw ConfigError("the maturity grid must span at least a decade");

    std::string regime;
    double target, tol;
    if (a * taus.back() <= 0.1 * (1.0 + 1e-12)) {
        regime = "short";
        target = H - 0.5;
        tol = m.fou.hurst.is_half() ? 0.05 : 0.1;
    } else if (a * taus.front() >= 10.0 * (1.0 - 1e-12)) {
        regime = "long";
        target = H - 1.5;
        tol = 0.15;
    } else {
        throw ConfigError("maturities must all satisfy a tau <= 0.1 or all a tau >= 10");
    }

    cfg.dt = taus.front() / static_cast<double>(opt.steps_per_min_tau);
    const double x = 1.0;
    std::vector<double> slopes, analytic;
    ExperimentReport rep;
    rep.id = "skew_powerlaw_h" + fmt(H) + "_" + regime;
    for (double tau : taus) {
        CrnExperiment ex(tau, cfg);
        const std::size_t v = ex.add(m);
        const std::size_t c = ex.add_constant(m.sigma_bar, m.rho);
        std::vector<double> ks, strikes;
        for (int j = -opt.strikes_per_side; j <= opt.strikes_per_side; ++j) {
            ks.push_back(j * opt.strike_step * m.sigma_bar * std::sqrt(tau));
            strikes.push_back(x * std::exp(ks.back()));
        }
        const CrnResult r = ex.run(x, strikes);
        double skk = 0.0, skv = 0.0, svar = 0.0;
        Json ivs = Json::array();
        for (std::size_t j = 0; j < ks.size(); ++j) {
            const EuropeanCall call{strikes[j], tau};
            const McEstimate d = r.difference(v, c, j);
            const double price = bs_price(x, call, m.sigma_bar, tau) + d.value;
            const double iv = bs_implied_vol(price, x, call, tau);
            const double vega = bs_derivative_operators(x, call, m.sigma_bar, tau).gamma * m.sigma_bar * tau;
            const double iv_se = d.standard_error / vega;
            skk += ks[j] * ks[j];
            skv += ks[j] * iv;
            svar += ks[j] * ks[j] * iv_se * iv_se;
            ivs.push_back(Json{{"log_moneyness", ks[j]}, {"iv", iv}, {"iv_se", iv_se}});
        }
        const double slope = skv / skk;
        const double exact = m.delta * m.rho * d_function(tau, m.fou) / (m.sigma_bar * tau * tau);
        slopes.push_back(std::abs(slope));
        analytic.push_back(std::abs(exact));
        rep.cells.push_back(Json{{"tau", tau},
                                 {"a_tau", a * tau},
                                 {"mc_slope", slope},
                                 {"mc_slope_se", std::sqrt(svar) / skk},
                                 {"first_order_slope", exact},
                                 {"points", std::move(ivs)}});
    }
    const LineFit mc_fit = log_log_fit(taus, slopes);
    const LineFit an_fit = log_log_fit(taus, analytic);
    rep.parameters = Json{{"model", to_json(m)},
                          {"taus", taus},
                          {"regime", regime},
                          {"strike_step", opt.strike_step},
                          {"strikes_per_side", opt.strikes_per_side},
                          {"mc", to_json(cfg)},
                          {"mc_exponent_se", mc_fit.slope_se},
                          {"first_order_exponent", an_fit.slope}};
    rep.criteria.push_back(Criterion::within("skew_exponent", mc_fit.slope, target, tol));
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

namespace {

struct Moments {
    double mean, var, se_mean, se_var;
};

Moments moments(std::vector<double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = num::pairwise_sum(v.data(), v.size()) / n;
    std::vector<double> sq(v.size()), q4(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - mean;
        sq[i] = d * d;
        q4[i] = sq[i] * sq[i];
    }
    const double m2 = num::pairwise_sum(sq.data(), sq.size()) / n;
    const double m4 = num::pairwise_sum(q4.data(), q4.size()) / n;
    const double var = m2 * n / (n - 1.0);
    return {mean, var, std::sqrt(var / n), std::sqrt(std::max(0.0, m4 - m2 * m2) / n)};
}

std::string cell_tag(const FouParams& p, double tau) {
    return "H=" + fmt(p.H()) + ",a=" + fmt(p.a) + (tau > 0.0 ? ",tau=" + fmt(tau) : "");
}

struct PhiCellResult {
    std::vector<Json> cells;
    std::vector<Criterion> criteria;
};

PhiCellResult phi_for_params(const FouParams& p, const std::vector<double>& taus,
                             const std::vector<double>& decade, const PathGrid& grid, std::size_t n,
                             std::uint64_t seed) {
    const KernelSpec k = KernelSpec::fou(p);
    const FactorSimulator sim(grid, k, HistoryMode::stationary);
    std::vector<PhiEvaluator> main_ev, decade_ev;
    for (double tau : taus) main_ev.emplace_back(grid, sim.layout(), k, 0, grid.t0 + tau);
    for (double tau : decade) decade_ev.emplace_back(grid, sim.layout(), k, 0, grid.t0 + tau);

    std::vector<std::vector<double>> phi(taus.size(), std::vector<double>(n));
    std::vector<std::vector<double>> gap(decade.size(), std::vector<double>(n));
    PathNormals nrm = sim.make_buffers();
    std::vector<double> z;
    for (std::size_t i = 0; i < n; ++i) {
        sim.sample(seed, i, nrm, z);
        for (std::size_t j = 0; j < taus.size(); ++j) phi[j][i] = main_ev[j](nrm.dW.data(), nrm.hist.data());
        for (std::size_t j = 0; j < decade.size(); ++j) {
            const double g = decade_ev[j](nrm.dW.data(), nrm.hist.data()) / decade[j] - z[0];
            gap[j][i] = g * g;
        }
    }

    PhiCellResult out;
    for (std::size_t j = 0; j < taus.size(); ++j) {
        const Moments mo = moments(std::move(phi[j]));
        const double exact = phi_variance(taus[j], k);
        out.cells.push_back(Json{{"H", p.H()},
                                 {"a", p.a},
                                 {"tau", taus[j]},
                                 {"mean", mo.mean},
                                 {"mean_se", mo.se_mean},
                                 {"variance", mo.var},
                                 {"variance_se", mo.se_var},
                                 {"phi_variance", exact}});
        out.criteria.push_back(
            Criterion::within("phi_mean_3se[" + cell_tag(p, taus[j]) + "]", mo.mean / mo.se_mean, 0.0, 3.0));
        out.criteria.push_back(Criterion::within("phi_variance_3se[" + cell_tag(p, taus[j]) + "]",
                                                 (mo.var - exact) / mo.se_var, 0.0, 3.0));
    }
    Json approach = Json::array();
    std::vector<double> ms;
    for (std::size_t j = 0; j < decade.size(); ++j) {
        ms.push_back(num::pairwise_sum(gap[j].data(), n) / static_cast<double>(n));
        approach.push_back(Json{{"tau", decade[j]}, {"mean_sq_phi_over_tau_minus_z", ms.back()}});
    }
    out.cells.push_back(Json{{"H", p.H()}, {"a", p.a}, {"small_tau_approach", std::move(approach)}});
    // E[(phi/tau - Z)^2] must shrink as tau decreases through the decade
    double violations = 0.0;
    for (std::size_t j = 0; j + 1 < ms.size(); ++j)
        if (!(ms[j] < ms[j + 1])) violations += 1.0;
    out.criteria.push_back(Criterion::within("phi_over_tau_approaches_z[" + cell_tag(p, 0.0) + "]", violations, 0.0, 0.0));
    return out;
}

}  // namespace

ExperimentReport run_phi_statistics(const std::vector<FouParams>& params, const std::vector<double>& tau_grid,
                                    McConfig cfg) {
    const auto t0 = Clock::now();
    if (params.empty() || tau_grid.empty()) throw ConfigError("phi statistics need a nonempty grid");
    if (cfg.n_paths < 2) throw ConfigError("phi statistics need at least 2 samples");
    std::vector<double> taus = tau_grid;
    std::sort(taus.begin(), taus.end());
    for (double t : taus)
        if (!(t > 0.0)) throw DomainError("maturities must be positive");
    std::vector<double> decade;
    for (int j = 3; j >= 0; --j) decade.push_back(taus.front() * std::pow(10.0, -j / 3.0));

    cfg.history = HistoryMode::stationary;
    cfg.dt = std::min(cfg.dt, decade.front() / 64.0);
    PathGrid grid = cfg.grid(0.0, cfg.dt);

    std::vector<PhiCellResult> res(params.size());
    std::vector<std::exception_ptr> errors(params.size());
    const bool par = cfg.execution == Execution::parallel;
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads()) if (par)
    for (std::size_t i = 0; i < params.size(); ++i) {
        try {
            res[i] = phi_for_params(params[i], taus, decade, grid, cfg.n_paths, cfg.seed);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ExperimentReport rep;
    rep.id = "phi_statistics";
    Json plist = Json::array();
    for (const auto& p : params) plist.push_back(to_json(p));
    rep.parameters = Json{{"kernels", std::move(plist)},
                          {"taus", taus},
                          {"small_tau_decade", decade},
                          {"samples", cfg.n_paths},
                          {"grid", to_json(grid)},
                          {"mc", to_json(cfg)}};
    for (auto& r : res) {
        for (auto& c : r.cells) rep.cells.push_back(std::move(c));
        for (auto& c : r.criteria) rep.criteria.push_back(std::move(c));
    }
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

ExperimentReport run_phi_statistics(const FouParams& p, const std::vector<double>& tau_grid, McConfig cfg) {
    return run_phi_statistics(std::vector<FouParams>{p}, tau_grid, std::move(cfg));
}

std::vector<std::string> validation_suites() { return {"all", "delta", "skew", "phi"}; }

std::vector<ExperimentReport> run_validation_suite(const std::string& suite, std::uint64_t seed) {
    const auto names = validation_suites();
    if (std::find(names.begin(), names.end(), suite) == names.end())
        throw ConfigError("unknown validation suite '" + suite + "'");
    const bool all = suite == "all";
    std::vector<ExperimentReport> out;

    McConfig mc;
    mc.n_paths = 100000;
    mc.dt = 1.0 / 256.0;
    mc.seed = seed;

    if (all || suite == "delta") {
        // c close to sigma_bar keeps F as near the identity as positivity allows
        const FsvModel fsv{.sigma_bar = 0.2, .delta = 0.1, .rho = -0.5, .fou = FouParams(0.3, 1.0), .f = TanhMap{0.19}};
        out.push_back(run_delta_convergence(fsv, EuropeanCall{1.0, 1.0}, {0.0, 0.025, 0.05, 0.1, 0.2}, mc));
        for (double h : {0.3, 0.7}) {
            const SlowFsvModel slow{.delta = 0.1,
                                    .rho = -0.5,
                                    .fou = FouParams(h, 1.0),
                                    .f = SlowTanhMap{0.05, 0.15},
                                    .z0 = 0.0};
            out.push_back(run_delta_convergence(slow, EuropeanCall{1.0, 1.0}, {0.025, 0.05, 0.1, 0.2}, mc));
        }
    }
    if (all || suite == "skew") {
        auto grid = [](double lo, double hi) {
            std::vector<double> g;
            for (int i = 0; i < 5; ++i) g.push_back(lo * std::pow(hi / lo, i / 4.0));
            return g;
        };
        auto model = [](double h) {
            return FsvModel{.sigma_bar = 0.2, .delta = 0.05, .rho = -0.5, .fou = FouParams(h, 1.0), .f = TanhMap{0.1}};
        };
        out.push_back(run_skew_powerlaw(model(0.2), grid(0.01, 0.1), mc));
        out.push_back(run_skew_powerlaw(model(0.8), grid(10.0, 100.0), mc));
        out.push_back(run_skew_powerlaw(model(0.5), grid(0.01, 0.1), mc));
    }
    if (all || suite == "phi") {
        McConfig pc = mc;
        pc.n_paths = 10000;
        std::vector<FouParams> params;
        for (double h : {0.3, 0.5, 0.7})
            for (double a : {0.5, 1.0}) params.emplace_back(h, a);
        out.push_back(run_phi_statistics(params, {0.25, 1.0, 4.0}, pc));
    }
    return out;
}

}  // namespace fracvol
