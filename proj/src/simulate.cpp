#include "fracvol/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fracvol/errors.hpp"
#include "fracvol/numerics.hpp"

namespace fracvol {

void PathGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid dt must be positive");
    if (n_steps < 1) throw ConfigError("grid needs at least one step");
    if (!(history_growth >= 1.0)) throw ConfigError("history_growth must be >= 1");
    if (!(history_horizon >= 0.0)) throw ConfigError("history_horizon must be >= 0");
    if (!(truncation_tol > 0.0 && truncation_tol < 1.0)) throw ConfigError("truncation_tol must lie in (0,1)");
    if (!std::isfinite(t0)) throw ConfigError("grid t0 must be finite");
}

double truncation_horizon(const KernelSpec& k, double rel_tol) {
    const double target = rel_tol * k.sigma_z_sq();
    auto tail = [&](double u) { return num::integrate_power_tail([&](double s) { double v = k(s); return v * v; }, u, 1e-6); };
    double u = 10.0 * k.time_scale();
    if (tail(u) <= target) return u;
    // jump close to the answer using the power-law tail c^2 u^(2H-2)/(2-2H)
    const double c = k.tail_constant();
    const double H = k.hurst().value();
    if (c != 0.0) {
        const double est = std::pow(c * c / ((2.0 - 2.0 * H) * target), 1.0 / (2.0 - 2.0 * H));
        u = std::max(u, 0.5 * est);
    }
    for (int it = 0; it < 200; ++it) {
        if (tail(u) <= target) return u;
        u *= 1.25;
    }
    throw NumericalError("truncation horizon search did not terminate", tail(u) / k.sigma_z_sq());
}

HistoryLayout make_history_layout(const PathGrid& grid, const KernelSpec& k) {
    grid.validate();
    const double required = truncation_horizon(k, grid.truncation_tol);
    double horizon = required;
    if (grid.history_horizon > 0.0) {
        if (grid.history_horizon < required) {
            std::ostringstream os;
            os << "history horizon " << grid.history_horizon << " is shorter than the truncation horizon "
               << required << " required for tolerance " << grid.truncation_tol;
            throw ConfigError(os.str());
        }
        horizon = grid.history_horizon;
    }
    HistoryLayout out;
    out.edges.push_back(0.0);
    if (grid.history_growth == 1.0) {
        const double need = std::ceil(horizon / grid.dt);
        if (static_cast<double>(grid.n_history) < need) {
            std::ostringstream os;
            os << "insufficient history: uniform cells need n_history >= " << static_cast<long long>(need)
               << " at dt=" << grid.dt << " (horizon " << horizon << ")";
            throw ConfigError(os.str());
        }
        for (std::size_t b = 1; b <= grid.n_history; ++b) out.edges.push_back(-static_cast<double>(b) * grid.dt);
        return out;
    }
    const std::size_t n_uniform = std::max<std::size_t>(grid.n_history, 1);
    double e = 0.0;
    for (std::size_t b = 0; b < n_uniform && -e < horizon; ++b) {
        e -= grid.dt;
        out.edges.push_back(e);
    }
    double w = grid.dt;
    while (-e < horizon) {
        w *= grid.history_growth;
        e -= w;
        out.edges.push_back(e);
    }
    return out;
}

FactorSimulator::FactorSimulator(const PathGrid& grid, const KernelSpec& k, HistoryMode mode, double offset,
                                 std::vector<double> fixed_history)
    : grid_(grid), kernel_(k), mode_(mode), fixed_history_(std::move(fixed_history)) {
    grid_.validate();
    const std::size_t n = grid_.n_steps;
    const double dt = grid_.dt;

    if (mode_ != HistoryMode::flat) layout_ = make_history_layout(grid_, k);
    else layout_.edges = {0.0};
    const std::size_t M = layout_.size();
    if (mode_ == HistoryMode::fixed && fixed_history_.size() != M) {
        std::ostringstream os;
        os << "fixed history has " << fixed_history_.size() << " increments, the layout needs " << M;
        throw ConfigError(os.str());
    }

    // theta on uniform nodes, shared by the live weights and the uniform past cells
    std::size_t n_uniform = 0;
    while (n_uniform < M && std::abs(layout_.width(n_uniform) - dt) <= 1e-12 * dt) ++n_uniform;
    std::vector<double> th(n + n_uniform + 1);
    th[0] = 0.0;
    for (std::size_t j = 1; j < th.size(); ++j) th[j] = k.primitive(static_cast<double>(j) * dt);

    plan_.n_steps = n;
    plan_.kbar.resize(n);
    for (std::size_t m = 1; m <= n; ++m) plan_.kbar[m - 1] = (th[m] - th[m - 1]) / dt;

    if (grid_.exact_first_cell) {
        const double k2 = num::integrate([&](double u) { double v = k(u); return v * v; }, 0.0, dt, 1e-12);
        plan_.xi_coeff = std::sqrt(std::max(0.0, k2 - th[1] * th[1] / dt));
    }

    plan_.base.assign(n + 1, offset);
    if (M > 0) {
        std::vector<double> weights((n + 1) * M);
        for (std::size_t i = 0; i <= n; ++i) {
            const double ti = static_cast<double>(i) * dt;
            for (std::size_t b = 0; b < M; ++b) {
                double inc;
                if (b < n_uniform) inc = th[i + b + 1] - th[i + b];
                else inc = k.primitive(ti - layout_.edges[b + 1]) - k.primitive(ti - layout_.edges[b]);
                weights[i * M + b] = inc / layout_.width(b);
            }
        }
        if (mode_ == HistoryMode::stationary) {
            plan_.n_hist = M;
            plan_.hist_weights = std::move(weights);
            plan_.hist_sd.resize(M);
            for (std::size_t b = 0; b < M; ++b) plan_.hist_sd[b] = std::sqrt(layout_.width(b));
        } else {
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t b = 0; b < M; ++b) plan_.base[i] += weights[i * M + b] * fixed_history_[b];
        }
    }
}

PathNormals FactorSimulator::make_buffers() const {
    PathNormals nrm;
    nrm.resize(plan_.n_steps, plan_.n_hist);
    return nrm;
}

void FactorSimulator::sample(std::uint64_t seed, std::uint64_t path_id, PathNormals& nrm, std::vector<double>& z,
                             bool antithetic) const {
    nrm.resize(plan_.n_steps, plan_.n_hist);
    z.resize(plan_.n_steps + 1);
    draw_normals(seed, path_id, grid_.dt, plan_.hist_sd, antithetic, nrm);
    factor_path(plan_, nrm, z.data());
}

FouPath simulate_fou(const PathGrid& grid, const FouParams& p, std::uint64_t seed, std::uint64_t path_id) {
    const FactorSimulator sim(grid, KernelSpec::fou(p), HistoryMode::stationary);
    PathNormals nrm = sim.make_buffers();
    FouPath out;
    sim.sample(seed, path_id, nrm, out.z_path);
    out.dW = nrm.dW;
    out.history_dW = nrm.hist;
    return out;
}

namespace {

SimulatedScenario run_scenario(const FactorSimulator& sim, const VolMap& vol, double rho, std::uint64_t seed,
                               double x0, std::uint64_t path_id) {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("x0 must be positive");
    SimulatedScenario s;
    s.grid = sim.grid();
    s.seed = seed;
    s.path_id = path_id;
    s.mode = sim.mode();
    s.kernel = sim.kernel().describe();
    s.history = sim.layout();
    PathNormals nrm = sim.make_buffers();
    sim.sample(seed, path_id, nrm, s.z_path);
    const std::size_t n = s.grid.n_steps;
    s.sigma_path.resize(n + 1);
    s.x_path.resize(n + 1);
    evolve_log_price(vol, rho, s.grid.dt, s.z_path.data(), nrm.dW.data(), nrm.dB.data(), n, std::log(x0),
                     s.sigma_path.data(), s.x_path.data());
    s.dW = std::move(nrm.dW);
    s.dB = std::move(nrm.dB);
    s.history_dW = std::move(nrm.hist);
    return s;
}

}  // namespace

SimulatedScenario simulate_asset(const FsvModel& m, const PathGrid& grid, std::uint64_t seed, double x0,
                                 HistoryMode mode, std::uint64_t path_id) {
    m.validate();
    if (mode == HistoryMode::fixed) throw ConfigError("simulate_asset supports stationary and flat history");
    const FactorSimulator sim(grid, KernelSpec::fou(m.fou), mode);
    return run_scenario(sim, VolMap::small_fluctuation(m.sigma_bar, m.f.c, m.delta), m.rho, seed, x0, path_id);
}

SimulatedScenario simulate_asset(const SlowFsvModel& m, const PathGrid& grid, std::uint64_t seed, double x0,
                                 HistoryMode mode, std::uint64_t path_id) {
    m.validate();
    if (mode == HistoryMode::fixed) throw ConfigError("simulate_asset supports stationary and flat history");
    const double offset = mode == HistoryMode::flat ? m.z0 : 0.0;
    const FactorSimulator sim(grid, m.kernel(), mode, offset);
    return run_scenario(sim, VolMap::slow(m.f.sigma_min, m.f.c), m.rho, seed, x0, path_id);
}

PhiEvaluator::PhiEvaluator(const PathGrid& grid, const HistoryLayout& layout, const KernelSpec& k,
                           std::size_t t_index, double T) {
    using GL = boost::math::quadrature::gauss<double, 8>;
    const double t = grid.node(t_index);
    const double tau = T - t;
    if (tau < 0.0) throw DomainError("phi requires t <= T");

    // (1/width) int_lo^hi [theta(T-u) - theta(t-u)] du
    auto cell = [&](double lo, double hi) {
        const double width = hi - lo;
        if (tau == 0.0) return 0.0;
        const double dist = t - hi;
        if (dist > 8.0 * (tau + width)) {
            const double v = GL::integrate(
                [&](double u) { return GL::integrate([&](double s) { return k(s); }, t - u, T - u); }, lo, hi);
            return v / width;
        }
        const double v = k.second_primitive(T - lo) - k.second_primitive(T - hi) - k.second_primitive(t - lo) +
                         k.second_primitive(dist);
        return v / width;
    };

    live_.resize(t_index);
    for (std::size_t j = 0; j < t_index; ++j) live_[j] = cell(grid.node(j), grid.node(j + 1));
    hist_.resize(layout.size());
    for (std::size_t b = 0; b < layout.size(); ++b)
        hist_[b] = cell(grid.t0 + layout.edges[b + 1], grid.t0 + layout.edges[b]);
}

double PhiEvaluator::operator()(const double* dW, const double* history_dW) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < live_.size(); ++j) acc += live_[j] * dW[j];
    if (history_dW)
        for (std::size_t b = 0; b < hist_.size(); ++b) acc += hist_[b] * history_dW[b];
    return acc;
}

double phi_from_history(const SimulatedScenario& s, double t, double T, const KernelSpec& k) {
    if (k.describe() != s.kernel)
        throw ConfigError("phi kernel " + k.describe() + " does not match the scenario kernel " + s.kernel);
    if (t > T) throw DomainError("phi requires t <= T");
    const double pos = (t - s.grid.t0) / s.grid.dt;
    const double idx = std::round(pos);
    if (idx < 0.0 || idx > static_cast<double>(s.grid.n_steps) || std::abs(pos - idx) > 1e-9 * std::max(1.0, pos))
        throw DomainError("phi requires t on a grid node of the scenario");
    if (t == T) return 0.0;
    const PhiEvaluator phi(s.grid, s.history, k, static_cast<std::size_t>(idx), T);
    return phi(s.dW.data(), s.history_dW.empty() ? nullptr : s.history_dW.data());
}

}  // namespace fracvol
