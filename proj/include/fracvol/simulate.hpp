#pragma once
/// @file simulate.hpp
/// Simulation of the volatility factor Z = int K(t-s) dW_s on a time grid,
/// of the correlated asset path, and of the random component
/// phi_t = int_{-inf}^t [theta(T-u) - theta(t-u)] dW_u.
///
/// The infinite past is represented by a finite set of cells: n_history
/// cells of width dt next to t0, then cells growing geometrically out to
/// the truncation horizon. Kernel weights are exact cell averages.

#include <cstdint>
#include <string>
#include <vector>

#include "fracvol/kernel.hpp"
#include "fracvol/model.hpp"
#include "fracvol/path_kernels.hpp"

namespace fracvol {

struct PathGrid {
    double t0 = 0.0;
    double dt = 1.0 / 256.0;
    std::size_t n_steps = 256;
    std::size_t n_history = 64;    ///< past cells of width dt before the graded part
    double history_growth = 1.1;   ///< width ratio of successive graded cells; 1 disables grading
    double history_horizon = 0.0;  ///< 0 derives it from truncation_tol
    double truncation_tol = 1e-6;  ///< int_U^inf K^2 < tol * sigma_z^2
    bool exact_first_cell = true;  ///< add the within-cell variance the averages miss

    void validate() const;
    double node(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
};

enum class HistoryMode {
    stationary,  ///< past increments drawn, so Z is a stationary sample
    flat,        ///< no past noise: Z starts at its offset and phi_t0 = 0
    fixed,       ///< past increments supplied by the caller
};

/// Past cells, most recent first: edges 0 = e_0 > e_1 > ... > e_M, relative to t0.
struct HistoryLayout {
    std::vector<double> edges;
    std::size_t size() const { return edges.empty() ? 0 : edges.size() - 1; }
    double width(std::size_t b) const { return edges[b] - edges[b + 1]; }
};

/// Smallest U with int_U^inf K^2 < rel_tol * sigma_z^2, and at least
/// 10 natural time scales.
double truncation_horizon(const KernelSpec& k, double rel_tol);

/// Throws ConfigError when an explicit horizon, or uniform cells, cannot
/// reach the required truncation horizon.
HistoryLayout make_history_layout(const PathGrid& grid, const KernelSpec& k);

/// Precomputed weights for one kernel on one grid.
class FactorSimulator {
public:
    /// `offset` is a constant added to Z (the slow model's z0 in flat mode).
    /// `fixed_history` holds one increment per past cell, most recent first.
    FactorSimulator(const PathGrid& grid, const KernelSpec& k, HistoryMode mode, double offset = 0.0,
                    std::vector<double> fixed_history = {});

    const PathGrid& grid() const { return grid_; }
    const KernelSpec& kernel() const { return kernel_; }
    const HistoryLayout& layout() const { return layout_; }
    const FactorPlan& plan() const { return plan_; }
    HistoryMode mode() const { return mode_; }

    /// Draws the normals of (seed, path_id) and fills z (n_steps+1 values).
    void sample(std::uint64_t seed, std::uint64_t path_id, PathNormals& nrm, std::vector<double>& z,
                bool antithetic = false) const;
    PathNormals make_buffers() const;

private:
    PathGrid grid_;
    KernelSpec kernel_;
    HistoryMode mode_;
    HistoryLayout layout_;
    FactorPlan plan_;
    std::vector<double> fixed_history_;
};

struct FouPath {
    std::vector<double> z_path;      ///< Z at t_0..t_n
    std::vector<double> dW;          ///< the increments that drive it
    std::vector<double> history_dW;  ///< past-cell increments, most recent first
};

/// One stationary fOU path for (seed, path_id).
FouPath simulate_fou(const PathGrid& grid, const FouParams& p, std::uint64_t seed, std::uint64_t path_id = 0);

struct SimulatedScenario {
    PathGrid grid;
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;
    HistoryMode mode = HistoryMode::stationary;
    std::string kernel;  ///< description of the kernel behind z_path
    std::vector<double> dW, dB;
    std::vector<double> z_path, sigma_path, x_path;  ///< nodes t_0..t_n
    HistoryLayout history;
    std::vector<double> history_dW;
};

/// Asset path under the small-fluctuation model. In stationary mode Z is a
/// stationary draw; in flat mode Z starts at 0.
SimulatedScenario simulate_asset(const FsvModel& m, const PathGrid& grid, std::uint64_t seed, double x0,
                                 HistoryMode mode = HistoryMode::stationary, std::uint64_t path_id = 0);
/// Slow-factor model, driven by the dilated kernel. In flat mode Z starts at
/// z0; in stationary mode z0 is not used.
SimulatedScenario simulate_asset(const SlowFsvModel& m, const PathGrid& grid, std::uint64_t seed, double x0,
                                 HistoryMode mode = HistoryMode::flat, std::uint64_t path_id = 0);

/// Linear functional phi_t of the increments before a grid node t:
/// one weight per live cell before t and one per past cell.
class PhiEvaluator {
public:
    PhiEvaluator(const PathGrid& grid, const HistoryLayout& layout, const KernelSpec& k, std::size_t t_index,
                 double T);
    double operator()(const double* dW, const double* history_dW) const;
    const std::vector<double>& live_weights() const { return live_; }
    const std::vector<double>& history_weights() const { return hist_; }

private:
    std::vector<double> live_;
    std::vector<double> hist_;
};

/// Realized phi_t for a scenario; t must be a grid node and k the kernel
/// the scenario was simulated with.
double phi_from_history(const SimulatedScenario& s, double t, double T, const KernelSpec& k);

}  // namespace fracvol
