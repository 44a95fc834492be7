#pragma once
/// @file montecarlo.hpp
/// Monte Carlo pricing of European calls under the simulated models. All
/// variants added to one experiment see the same Brownian increments
/// (common random numbers), so differences between variants carry only
/// the noise of the difference.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fracvol/market.hpp"
#include "fracvol/model.hpp"
#include "fracvol/parallel.hpp"
#include "fracvol/simulate.hpp"

namespace fracvol {

/// What each path contributes. The conditional estimator integrates the
/// asset's own noise dB analytically: given the factor path, log X_T is
/// Gaussian, so the path value is a Black-Scholes price.
enum class Estimator { payoff, conditional };

struct McConfig {
    std::size_t n_paths = 100000;
    double dt = 1.0 / 256.0;  ///< largest step; the horizon is split into equal steps
    std::uint64_t seed = 1;
    HistoryMode history = HistoryMode::flat;
    std::vector<double> history_dW;  ///< fixed mode only, most recent cell first
    std::size_t n_history = 64;
    double history_growth = 1.1;
    double truncation_tol = 1e-6;
    bool antithetic = false;
    bool exact_first_cell = true;
    Estimator estimator = Estimator::conditional;
    /// Regress on zero-mean path functionals (W_T, W_T^2 - T, and per factor
    /// int (Z - E Z) dt and int (Z - E Z) dW).
    bool control_variates = true;
    Execution execution = Execution::parallel;

    void validate() const;
    PathGrid grid(double t0, double tau) const;
};

struct McEstimate {
    double value;
    double standard_error;
};

/// Per-path values of every (variant, strike) pair plus the control
/// functionals recorded on the same paths.
class CrnResult {
public:
    CrnResult(std::size_t n_paths, std::size_t n_variants, std::size_t n_strikes, bool antithetic,
              std::vector<long> variant_plan, std::size_t n_plans, bool use_controls);

    std::size_t n_paths() const { return n_paths_; }
    std::span<const double> payoffs(std::size_t variant, std::size_t strike) const;
    McEstimate estimate(std::size_t variant, std::size_t strike) const;
    /// Mean and standard error of payoff(v1) - payoff(v2), path by path.
    McEstimate difference(std::size_t v1, std::size_t v2, std::size_t strike) const;

    double* slot(std::size_t variant, std::size_t strike) {
        return payoff_.data() + (variant * n_strikes_ + strike) * n_paths_;
    }
    /// Column c of the controls: 0 = W_T, 1 = W_T^2 - T, then two per plan.
    double* control(std::size_t c) { return controls_.data() + c * n_paths_; }
    static constexpr std::size_t n_common_controls = 2;

private:
    McEstimate summarize(const std::vector<double>& samples, const std::vector<std::size_t>& cols) const;
    std::vector<std::size_t> control_columns(std::initializer_list<std::size_t> variants) const;
    std::size_t n_paths_, n_variants_, n_strikes_;
    bool antithetic_;
    std::vector<long> variant_plan_;
    bool use_controls_;
    std::vector<double> payoff_;
    std::vector<double> controls_;
};

class CrnExperiment {
public:
    /// tau is the time to maturity; the path grid starts at t0.
    CrnExperiment(double tau, McConfig cfg, double t0 = 0.0);
    ~CrnExperiment();
    CrnExperiment(CrnExperiment&&) noexcept;

    std::size_t add(const FsvModel& m);
    std::size_t add(const SlowFsvModel& m);
    /// Constant volatility (Black-Scholes) variant on the same noise.
    std::size_t add_constant(double sigma, double rho = 0.0);

    /// Strikes may include 0, which returns X_T itself.
    CrnResult run(double x0, const std::vector<double>& strikes) const;

    const PathGrid& grid() const { return grid_; }
    const McConfig& config() const { return cfg_; }

private:
    struct Variant;
    std::size_t plan_for(const KernelSpec& k, double offset);

    McConfig cfg_;
    PathGrid grid_;
    std::vector<std::unique_ptr<FactorSimulator>> plans_;
    std::vector<Variant> variants_;
};

McEstimate mc_price(const FsvModel& m, const EuropeanCall& option, const MarketState& state, const McConfig& cfg);
McEstimate mc_price(const SlowFsvModel& m, const EuropeanCall& option, const MarketState& state,
                    const McConfig& cfg);

}  // namespace fracvol
