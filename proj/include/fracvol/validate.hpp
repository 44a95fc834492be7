#pragma once
/// @file validate.hpp
/// Experiments that hold the analytic approximations against the simulation
/// engine: error order in delta, Monte Carlo skew power laws, and the
/// statistics of the conditional factor phi. Each returns a report whose
/// criteria carry the measured value, the target and the tolerance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracvol/market.hpp"
#include "fracvol/model.hpp"
#include "fracvol/montecarlo.hpp"

namespace fracvol {

using Json = nlohmann::ordered_json;

struct Criterion {
    std::string name;
    double measured;
    double target;
    double tolerance;  ///< pass iff |measured - target| <= tolerance
    bool pass;

    static Criterion within(std::string name, double measured, double target, double tolerance);
    static Criterion in_range(std::string name, double measured, double lo, double hi);
};

struct ExperimentReport {
    std::string id;
    Json parameters;  ///< resolved configuration, seed included
    std::vector<Json> cells;
    std::vector<Criterion> criteria;
    double runtime_seconds = 0.0;

    bool passed() const;
    /// Runtime is left out unless asked for, so reports from identical runs
    /// compare equal byte for byte.
    Json to_json(bool with_runtime = false) const;
    static ExperimentReport from_json(const Json& j);
};

/// Pass criteria for an error-order study. By default: exponent 2 +- 0.3 and
/// err(0.2)/err(0.1) in [3, 5.5] for the small-fluctuation model, exponent
/// 2H +- 0.3 for the slow model.
struct ConvergenceTargets {
    double exponent;
    double exponent_tol;
    std::optional<std::pair<double, double>> ratio_range;  ///< err(0.2)/err(0.1)
    double se_fraction = 0.2;  ///< SE of every err must stay below this share of it
    std::size_t max_paths = 0;  ///< path budget; 0 means 4x the configured count
};
ConvergenceTargets default_targets(const FsvModel& m);
ConvergenceTargets default_targets(const SlowFsvModel& m);

/// err(delta) = |(mc(delta) - mc(control)) - (analytic(delta) - q0)| with the
/// control (delta = 0, or constant sigma_0 for the slow model) on the same
/// paths. The path count doubles until every err is resolved to the SE
/// target; BudgetError when the budget runs out first.
ExperimentReport run_delta_convergence(const FsvModel& tmpl, const EuropeanCall& option,
                                       const std::vector<double>& deltas, McConfig cfg,
                                       std::optional<ConvergenceTargets> targets = {});
ExperimentReport run_delta_convergence(const SlowFsvModel& tmpl, const EuropeanCall& option,
                                       const std::vector<double>& deltas, McConfig cfg,
                                       std::optional<ConvergenceTargets> targets = {});

struct SkewOptions {
    double strike_step = 0.25;  ///< log-moneyness spacing in units of sigma_bar sqrt(tau)
    int strikes_per_side = 2;
    std::size_t steps_per_min_tau = 64;
};

/// Monte Carlo implied-vol skew slopes across maturities and their fitted
/// power-law exponent, against H - 1/2 (all a tau <= 0.1) or H - 3/2 (all
/// a tau >= 10). The grid must span a decade inside one regime.
ExperimentReport run_skew_powerlaw(const FsvModel& m, const std::vector<double>& tau_grid, McConfig cfg,
                                   const SkewOptions& opt = {});

/// Ensemble mean and variance of phi_t(tau) from stationary histories
/// against phi_variance, plus the small-tau approach phi/tau -> Z_t checked
/// on the decade below the smallest tau. cfg.n_paths is the sample count.
ExperimentReport run_phi_statistics(const std::vector<FouParams>& params, const std::vector<double>& tau_grid,
                                    McConfig cfg);
ExperimentReport run_phi_statistics(const FouParams& p, const std::vector<double>& tau_grid, McConfig cfg);

/// The standard experiments behind the acceptance suite. `suite` is one of
/// all, delta, skew, phi.
std::vector<ExperimentReport> run_validation_suite(const std::string& suite, std::uint64_t seed);
std::vector<std::string> validation_suites();

}  // namespace fracvol
