// fracvol: command-line front end for kernel tables, simulation, pricing,
// implied-vol surfaces, calibration and the validation suite.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracvol/calibrate.hpp"
#include "fracvol/errors.hpp"
#include "fracvol/implied_vol.hpp"
#include "fracvol/io.hpp"
#include "fracvol/kernel.hpp"
#include "fracvol/model.hpp"
#include "fracvol/montecarlo.hpp"
#include "fracvol/pricing.hpp"
#include "fracvol/serialize.hpp"
#include "fracvol/simulate.hpp"
#include "fracvol/validate.hpp"

using namespace fracvol;

namespace {

enum Exit { ok = 0, usage = 2, schema = 3, numerical = 4, validation_failed = 5 };

struct ModelFlags {
    std::string kind = "fsv";
    double H = 0.3, a = 1.0, sigma_bar = 0.2, delta = 0.1, rho = -0.5, c = 0.1;
    double sigma_min = 0.1, z0 = 0.0;

    void attach(CLI::App* app, bool with_kind = true) {
        if (with_kind)
            app->add_option("--model", kind, "fsv (sigma_bar + c tanh(delta Z / c)) or slow (sigma_min + c(1 + tanh Z^delta))")
                ->check(CLI::IsMember({"fsv", "slow"}));
        app->add_option("--H", H, "Hurst exponent in (0,1)");
        app->add_option("--a", a, "mean-reversion rate, 1/years");
        app->add_option("--sigma-bar", sigma_bar, "mean volatility level (fsv)");
        app->add_option("--delta", delta, "fluctuation amplitude (fsv) or time-scale ratio (slow)");
        app->add_option("--rho", rho, "leverage correlation");
        app->add_option("--c", c, "scale of the volatility map");
        app->add_option("--sigma-min", sigma_min, "volatility floor (slow)");
        app->add_option("--z0", z0, "current slow-factor value (slow)");
    }
    FsvModel fsv() const {
        FsvModel m{.sigma_bar = sigma_bar, .delta = delta, .rho = rho, .fou = FouParams(H, a), .f = TanhMap{c}};
        m.validate();
        return m;
    }
    SlowFsvModel slow() const {
        SlowFsvModel m{.delta = delta, .rho = rho, .fou = FouParams(H, a), .f = SlowTanhMap{sigma_min, c}, .z0 = z0};
        m.validate();
        return m;
    }
    Json echo() const { return kind == "slow" ? to_json(slow()) : to_json(fsv()); }
};

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("log grid needs 0 < lo < hi and at least 2 points");
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
    if (!(hi >= lo) || n < 1) throw DomainError("linear grid needs lo <= hi and at least 1 point");
    if (n == 1) return {lo};
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    return g;
}

/// Every option of the subcommand with its resolved value, as provenance.
Json resolved_config(const CLI::App* sub) {
    Json j;
    j["subcommand"] = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
        const std::string key = opt->get_lnames()[0];
        std::vector<std::string> vals = opt->count() > 0 ? opt->results() : std::vector<std::string>{};
        if (vals.empty()) {
            const std::string d = opt->get_default_str();
            if (d.empty() || d == "{}" || d == "[]") continue;  // unset vector option
            vals = {d};
        }
        Json arr = Json::array();
        for (const auto& v : vals) {
            const char* end = v.data() + v.size();
            long long whole = 0;
            double num = 0.0;
            if (auto r = std::from_chars(v.data(), end, whole); r.ec == std::errc() && r.ptr == end)
                arr.push_back(whole);
            else if (auto r2 = std::from_chars(v.data(), end, num); r2.ec == std::errc() && r2.ptr == end)
                arr.push_back(num);
            else
                arr.push_back(v);
        }
        j[key] = arr.size() == 1 && opt->get_items_expected_max() <= 1 ? arr[0] : arr;
    }
    return j;
}

Json provenance(const CLI::App* sub, const ModelFlags* model) {
    Json p;
    p["tool"] = "fracvol";
    p["config"] = resolved_config(sub);
    if (model) p["model"] = model->echo();
    return p;
}

int cmd_kernel(CLI::App* sub, const ModelFlags& mf, const std::vector<double>& taus,
               const std::vector<std::string>& grid, const std::string& out) {
    std::vector<double> t = taus;
    if (!grid.empty()) {
        if (grid.size() != 4 || grid[0] != "tau") throw DomainError("--grid-log expects: tau LO HI N");
        std::size_t pos = 0;
        const int n = std::stoi(grid[3], &pos);
        if (pos != grid[3].size()) throw DomainError("--grid-log point count must be an integer");
        const auto g = log_grid(std::stod(grid[1]), std::stod(grid[2]), n);
        t.insert(t.end(), g.begin(), g.end());
    }
    if (t.empty()) throw DomainError("give --tau values or --grid-log tau LO HI N");
    const FsvModel m = mf.fsv();
    const KernelSpec k = KernelSpec::fou(m.fou);
    CsvTable table;
    table.header = provenance(sub, &mf);
    table.notes = {"tau: lag or maturity in years; K: kernel; theta: int_0^tau K; D: int_0^tau theta",
                   "var_phi: stationary variance of phi for horizon tau; A: leverage skew amplitude"};
    table.columns = {"tau", "a_tau", "K", "theta", "D", "var_phi", "A"};
    for (double tau : t) {
        if (!(tau > 0.0)) throw DomainError("tau must be positive");
        table.rows.push_back({format_number(tau), format_number(m.fou.a * tau), format_number(k(tau)),
                              format_number(k.primitive(tau)), format_number(k.second_primitive(tau)),
                              format_number(phi_variance(tau, k)), format_number(skew_amplitude(tau, m))});
    }
    write_csv(out, table);
    return ok;
}

int cmd_simulate(CLI::App* sub, const ModelFlags& mf, double horizon, double dt, std::uint64_t seed,
                 std::uint64_t path_id, const std::string& history, double x0, const std::string& out) {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw DomainError("--T and --dt must be positive");
    PathGrid g;
    g.n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / dt - 1e-9)));
    g.dt = horizon / static_cast<double>(g.n_steps);
    const HistoryMode mode = history_mode_from_string(history);
    const SimulatedScenario s = mf.kind == "slow" ? simulate_asset(mf.slow(), g, seed, x0, mode, path_id)
                                                  : simulate_asset(mf.fsv(), g, seed, x0, mode, path_id);
    Json p = provenance(sub, &mf);
    p["grid"] = to_json(g);
    write_csv(out, scenario_table(s, p));
    return ok;
}

int cmd_price(CLI::App* sub, const ModelFlags& mf, const std::vector<double>& strikes,
              const std::vector<double>& maturities, const MarketState& state, bool mc, McConfig cfg,
              const std::string& out) {
    if (strikes.empty() || maturities.empty()) throw DomainError("give at least one --strike and one --maturity");
    std::vector<PriceRow> rows;
    std::vector<McEstimate> mc_rows;
    for (double T : maturities)
        for (double K : strikes) {
            const EuropeanCall opt{K, T};
            const PriceBreakdown b = mf.kind == "slow" ? slow_corrected_price(mf.slow(), opt, state)
                                                       : corrected_price(mf.fsv(), opt, state);
            rows.push_back({K, T, b});
            if (mc)
                mc_rows.push_back(mf.kind == "slow" ? mc_price(mf.slow(), opt, state, cfg)
                                                    : mc_price(mf.fsv(), opt, state, cfg));
        }
    Json p = provenance(sub, &mf);
    if (mc) p["mc"] = to_json(cfg);
    CsvTable t = price_table(rows, p);
    if (mc) {
        t.columns.push_back("mc");
        t.columns.push_back("mc_se");
        t.notes.push_back("mc, mc_se: Monte Carlo price from a flat history and its standard error");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            t.rows[i].push_back(format_number(mc_rows[i].value));
            t.rows[i].push_back(format_number(mc_rows[i].standard_error));
        }
    }
    write_csv(out, t);
    return ok;
}

int cmd_surface(CLI::App* sub, const ModelFlags& mf, std::vector<double> taus, const std::vector<double>& tau_grid,
                std::vector<double> moneyness, const std::vector<double>& m_grid, double spot, double as_of,
                double phi, double iv_min, const std::string& out) {
    if (!tau_grid.empty()) {
        if (tau_grid.size() != 3) throw DomainError("--tau-grid-log expects LO HI N");
        const auto g = log_grid(tau_grid[0], tau_grid[1], static_cast<int>(tau_grid[2]));
        taus.insert(taus.end(), g.begin(), g.end());
    }
    if (!m_grid.empty()) {
        if (m_grid.size() != 3) throw DomainError("--moneyness-grid expects LO HI N");
        const auto g = lin_grid(m_grid[0], m_grid[1], static_cast<int>(m_grid[2]));
        moneyness.insert(moneyness.end(), g.begin(), g.end());
    }
    if (taus.empty() || moneyness.empty()) throw DomainError("surface needs maturities and log-moneyness values");
    const FsvModel m = mf.fsv();
    MarketState state;
    state.t = as_of;
    state.x = spot;
    std::function<double(double)> phi_curve;
    if (phi != 0.0) phi_curve = [phi](double) { return phi; };
    VolSurface s = generate_surface(m, state, taus, moneyness, phi_curve, iv_min);
    s.spot = spot;
    s.as_of = as_of;
    auto level = [&](double tau) {
        MarketState st = state;
        st.phi = phi;
        return iv_first_order(m, st, EuropeanCall{spot, as_of + tau});
    };
    write_csv(out, surface_table(s, provenance(sub, &mf), level));
    return ok;
}

int cmd_calibrate(CLI::App* sub, const std::string& in, const FitConfig& fc, const std::string& out) {
    const VolSurface s = read_surface(in);
    const CalibratedParams p = fit_params(s, fc);
    Json j;
    j["provenance"] = provenance(sub, nullptr);
    j["input"] = Json{{"file", in}, {"points", s.points.size()}, {"spot", s.spot}, {"as_of", s.as_of}};
    const Json fit = calibration_json(p, s);
    for (const auto& [k, v] : fit.items()) j[k] = v;
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json(out, j);
    return ok;
}

int cmd_validate(CLI::App* sub, const std::string& suite, std::uint64_t seed, const std::string& out_dir) {
    const auto reports = run_validation_suite(suite, seed);
    std::filesystem::create_directories(out_dir);
    Json prov = provenance(sub, nullptr);
    Json all;
    all["provenance"] = prov;
    all["suite"] = suite;
    all["seed"] = seed;
    bool pass = true;
    Json list = Json::array();
    for (const auto& r : reports) {
        pass = pass && r.passed();
        list.push_back(r.to_json());
        write_csv((std::filesystem::path(out_dir) / (r.id + ".csv")).string(), report_cells_table(r, prov));
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.id << " (" << r.runtime_seconds << " s)\n";
        for (const auto& c : r.criteria)
            if (!c.pass)
                std::cout << "     " << c.name << ": measured " << c.measured << ", target " << c.target
                          << " +- " << c.tolerance << '\n';
    }
    all["passed"] = pass;
    all["reports"] = std::move(list);
    write_json((std::filesystem::path(out_dir) / "validation_report.json").string(), all);
    return pass ? ok : validation_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional stochastic volatility toolkit. All times are in years."};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.footer("Exit codes: 0 success, 2 usage or domain error, 3 input schema, 4 numerical failure, "
               "5 validation failure. FRACVOL_THREADS sets the worker count.");

    ModelFlags mf;
    std::string out;
    std::uint64_t seed = 1;

    auto* kernel = app.add_subcommand("kernel", "tabulate K, theta, D, Var phi and A over tau");
    std::vector<double> k_taus;
    std::vector<std::string> k_grid;
    mf.attach(kernel, false);
    kernel->add_option("--tau", k_taus, "maturities or lags");
    kernel->add_option("--grid-log", k_grid, "log-spaced grid: tau LO HI N")->expected(4);
    kernel->add_option("--out", out, "CSV file (stdout when omitted)");

    auto* simulate = app.add_subcommand("simulate", "simulate one factor/asset path");
    double sim_T = 1.0, sim_dt = 1.0 / 256.0, sim_x0 = 1.0;
    std::uint64_t path_id = 0;
    std::string history = "stationary";
    mf.attach(simulate);
    simulate->add_option("--T", sim_T, "horizon");
    simulate->add_option("--dt", sim_dt, "largest time step");
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--path-id", path_id, "path index within the seed's stream family");
    simulate->add_option("--history", history, "stationary or flat past")->check(CLI::IsMember({"stationary", "flat"}));
    simulate->add_option("--x0", sim_x0, "initial asset price");
    simulate->add_option("--out", out, "CSV file (stdout when omitted)");

    auto* price = app.add_subcommand("price", "first-order corrected call prices, optionally with Monte Carlo");
    std::vector<double> strikes, maturities;
    MarketState state;
    bool with_mc = false;
    McConfig mc;
    mf.attach(price);
    price->add_option("--strike,-K", strikes, "strikes")->required();
    price->add_option("--maturity,-T", maturities, "absolute maturities")->required();
    price->add_option("--t", state.t, "current time");
    price->add_option("--x", state.x, "current asset price");
    price->add_option("--phi", state.phi, "conditional factor phi_t (0: no conditioning information)");
    price->add_flag("--mc", with_mc, "add Monte Carlo columns");
    price->add_option("--paths", mc.n_paths, "Monte Carlo paths");
    price->add_option("--dt", mc.dt, "Monte Carlo time step");
    price->add_option("--seed", mc.seed, "Monte Carlo seed");
    price->add_option("--out", out, "CSV file (stdout when omitted)");

    auto* surface = app.add_subcommand("surface", "first-order implied-volatility surface");
    std::vector<double> s_taus, s_tau_grid, s_m, s_m_grid;
    double spot = 1.0, as_of = 0.0, s_phi = 0.0, iv_min = 1e-4;
    mf.attach(surface, false);
    surface->add_option("--tau", s_taus, "times to maturity");
    surface->add_option("--tau-grid-log", s_tau_grid, "log-spaced maturities: LO HI N")->expected(3);
    surface->add_option("--moneyness", s_m, "log-moneyness values log(K/x)");
    surface->add_option("--moneyness-grid", s_m_grid, "evenly spaced log-moneyness: LO HI N")->expected(3);
    surface->add_option("--spot", spot, "asset price");
    surface->add_option("--as-of", as_of, "valuation time");
    surface->add_option("--phi", s_phi, "constant conditional factor phi_t");
    surface->add_option("--iv-min", iv_min, "floor for formula values");
    surface->add_option("--out", out, "CSV file (stdout when omitted)");

    auto* calibrate = app.add_subcommand("calibrate", "fit (sigma_bar, H, delta rho, a) to a surface");
    std::string in;
    FitConfig fc;
    calibrate->add_option("--in", in, "surface CSV or JSON quote list")->required();
    calibrate->add_option("--starts", fc.n_starts, "multi-start count");
    calibrate->add_option("--fit-seed", fc.seed, "start placement seed");
    calibrate->add_option("--max-iter", fc.max_iter, "simplex iterations per start");
    calibrate->add_option("--out", out, "JSON report (stdout when omitted)");

    auto* validate = app.add_subcommand("validate", "run the simulation-vs-analytic validation suite");
    std::string suite = "all", out_dir = "validation";
    std::uint64_t v_seed = 7;
    validate->add_option("--suite", suite, "all, delta, skew or phi")->check(CLI::IsMember(validation_suites()));
    validate->add_option("--seed", v_seed, "random seed");
    validate->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*kernel) return cmd_kernel(kernel, mf, k_taus, k_grid, out);
        if (*simulate) return cmd_simulate(simulate, mf, sim_T, sim_dt, seed, path_id, history, sim_x0, out);
        if (*price) return cmd_price(price, mf, strikes, maturities, state, with_mc, mc, out);
        if (*surface) return cmd_surface(surface, mf, s_taus, s_tau_grid, s_m, s_m_grid, spot, as_of, s_phi, iv_min, out);
        if (*calibrate) return cmd_calibrate(calibrate, in, fc, out);
        if (*validate) return cmd_validate(validate, suite, v_seed, out_dir);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return schema;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical;
    } catch (const UnderIdentifiedError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad numeric argument (" << e.what() << ")\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return usage;
}
