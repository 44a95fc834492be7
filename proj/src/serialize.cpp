#include "fracvol/serialize.hpp"

#include "fracvol/errors.hpp"

namespace fracvol {

namespace {

double number(const Json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError("missing field", 0, key);
    const Json& v = j.at(key);
    if (!v.is_number()) throw SchemaError("expected a number", 0, key);
    return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

}  // namespace

Json to_json(const FouParams& p) { return Json{{"H", p.H()}, {"a", p.a}}; }

Json to_json(const FsvModel& m) {
    return Json{{"model", "fsv"},       {"sigma_bar", m.sigma_bar}, {"delta", m.delta}, {"rho", m.rho},
                {"H", m.fou.H()},       {"a", m.fou.a},             {"F", "c*tanh(x/c)"}, {"c", m.f.c}};
}

Json to_json(const SlowFsvModel& m) {
    return Json{{"model", "slow"}, {"delta", m.delta}, {"rho", m.rho},
                {"H", m.fou.H()},  {"a", m.fou.a},     {"F", "sigma_min+c*(1+tanh(x))"},
                {"sigma_min", m.f.sigma_min}, {"c", m.f.c}, {"z0", m.z0}};
}

Json to_json(const PathGrid& g) {
    return Json{{"t0", g.t0},
                {"dt", g.dt},
                {"n_steps", g.n_steps},
                {"n_history", g.n_history},
                {"history_growth", g.history_growth},
                {"history_horizon", g.history_horizon},
                {"truncation_tol", g.truncation_tol},
                {"exact_first_cell", g.exact_first_cell}};
}

Json to_json(const McConfig& c) {
    return Json{{"n_paths", c.n_paths},
                {"dt", c.dt},
                {"seed", c.seed},
                {"history", to_string(c.history)},
                {"n_history", c.n_history},
                {"history_growth", c.history_growth},
                {"truncation_tol", c.truncation_tol},
                {"antithetic", c.antithetic},
                {"exact_first_cell", c.exact_first_cell},
                {"estimator", c.estimator == Estimator::conditional ? "conditional" : "payoff"},
                {"control_variates", c.control_variates}};
}

FsvModel fsv_model_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("model must be a JSON object", 0, "model");
    FsvModel m{.sigma_bar = number(j, "sigma_bar"),
               .delta = number(j, "delta"),
               .rho = number(j, "rho"),
               .fou = FouParams(number(j, "H"), number(j, "a")),
               .f = TanhMap{number_or(j, "c", TanhMap{}.c)}};
    m.validate();
    return m;
}

SlowFsvModel slow_model_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("model must be a JSON object", 0, "model");
    SlowFsvModel m{.delta = number(j, "delta"),
                   .rho = number(j, "rho"),
                   .fou = FouParams(number(j, "H"), number(j, "a")),
                   .f = SlowTanhMap{number_or(j, "sigma_min", SlowTanhMap{}.sigma_min),
                                    number_or(j, "c", SlowTanhMap{}.c)},
                   .z0 = number_or(j, "z0", 0.0)};
    m.validate();
    return m;
}

std::string to_string(HistoryMode m) {
    switch (m) {
        case HistoryMode::stationary: return "stationary";
        case HistoryMode::flat: return "flat";
        case HistoryMode::fixed: return "fixed";
    }
    return "unknown";
}

HistoryMode history_mode_from_string(const std::string& s) {
    if (s == "stationary") return HistoryMode::stationary;
    if (s == "flat") return HistoryMode::flat;
    if (s == "fixed") return HistoryMode::fixed;
    throw ConfigError("unknown history mode '" + s + "' (expected stationary, flat or fixed)");
}

}  // namespace fracvol
