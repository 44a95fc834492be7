// Validation experiments on small budgets: report structure, criteria
// bookkeeping, configuration errors and run-to-run determinism.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fracvol/errors.hpp"
#include "fracvol/validate.hpp"

using namespace fracvol;

namespace {

const FsvModel kFsv{0.2, 0.1, -0.5, FouParams(0.3, 1.0), TanhMap{0.19}};
const SlowFsvModel kSlow{0.1, -0.5, FouParams(0.7, 1.0), SlowTanhMap{0.05, 0.15}, 0.0};

McConfig small(std::size_t n, std::uint64_t seed = 7) {
    McConfig c;
    c.n_paths = n;
    c.dt = 1.0 / 64;
    c.seed = seed;
    return c;
}

ConvergenceTargets loose(double exponent) {
    return {.exponent = exponent, .exponent_tol = 0.3, .ratio_range = std::nullopt, .se_fraction = 100.0};
}

const Criterion* find(const ExperimentReport& r, const std::string& name) {
    for (const auto& c : r.criteria)
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace

TEST(Criterion, WithinAndRange) {
    EXPECT_TRUE(Criterion::within("x", 2.2, 2.0, 0.3).pass);
    EXPECT_FALSE(Criterion::within("x", 2.4, 2.0, 0.3).pass);
    EXPECT_FALSE(Criterion::within("x", std::nan(""), 2.0, 0.3).pass);
    const Criterion r = Criterion::in_range("r", 2.85, 3.0, 5.5);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.target, 4.25);
    EXPECT_EQ(r.tolerance, 1.25);
    EXPECT_TRUE(Criterion::in_range("r", 3.0, 3.0, 5.5).pass);
}

TEST(Report, JsonRoundTripKeepsNaNAndDropsRuntime) {
    ExperimentReport r;
    r.id = "demo";
    r.parameters = Json{{"seed", 7}};
    r.cells = {Json{{"delta", 0.1}, {"err", 1e-3}}};
    r.criteria = {Criterion::within("a", 1.0, 1.0, 0.1), Criterion::within("b", std::nan(""), 0.0, 1.0)};
    r.runtime_seconds = 3.5;
    EXPECT_FALSE(r.passed());
    const Json j = r.to_json();
    EXPECT_FALSE(j.contains("runtime_seconds"));
    EXPECT_TRUE(j.at("criteria")[1].at("measured").is_null());
    const ExperimentReport back = ExperimentReport::from_json(r.to_json(true));
    EXPECT_EQ(back.id, "demo");
    EXPECT_EQ(back.runtime_seconds, 3.5);
    EXPECT_TRUE(std::isnan(back.criteria[1].measured));
    EXPECT_EQ(back.to_json(), j);
    EXPECT_THROW(ExperimentReport::from_json(Json{{"experiment", 1}}), SchemaError);
}

TEST(DeltaConvergence, ReportLayout) {
    const auto r = run_delta_convergence(kFsv, {1.0, 1.0}, {0.0, 0.1, 0.2}, small(2000), loose(2.0));
    ASSERT_EQ(r.cells.size(), 3u);
    EXPECT_EQ(r.cells[0].at("role"), "control");
    EXPECT_EQ(r.cells[1].at("delta"), 0.1);
    for (std::size_t i = 1; i < 3; ++i) {
        const double diff = r.cells[i].at("mc_difference"), corr = r.cells[i].at("analytic_correction");
        EXPECT_DOUBLE_EQ(r.cells[i].at("err").get<double>(), std::abs(diff - corr));
    }
    ASSERT_NE(find(r, "control_within_3se"), nullptr);
    ASSERT_NE(find(r, "error_exponent"), nullptr);
    EXPECT_EQ(find(r, "err_ratio_0.2_over_0.1"), nullptr);
    EXPECT_EQ(r.parameters.at("paths_requested"), 2000);
}

TEST(DeltaConvergence, DefaultTargets) {
    const auto f = default_targets(kFsv);
    EXPECT_EQ(f.exponent, 2.0);
    EXPECT_EQ(f.exponent_tol, 0.3);
    ASSERT_TRUE(f.ratio_range);
    EXPECT_EQ(f.ratio_range->first, 3.0);
    EXPECT_EQ(f.ratio_range->second, 5.5);
    const auto s = default_targets(kSlow);
    EXPECT_NEAR(s.exponent, 1.4, 1e-15);
    EXPECT_FALSE(s.ratio_range);
}

TEST(DeltaConvergence, SlowModelResolvesItsOrder) {
    // H = 0.7: err ~ delta^1.4, large enough to resolve on a modest budget
    const auto r = run_delta_convergence(kSlow, {1.0, 1.0}, {0.05, 0.1, 0.2, 0.4}, small(20000));
    EXPECT_TRUE(r.passed()) << r.to_json().dump(1);
}

TEST(DeltaConvergence, BudgetExhaustionIsReported) {
    ConvergenceTargets t = loose(2.0);
    t.se_fraction = 1e-6;
    t.max_paths = 4000;
    EXPECT_THROW(run_delta_convergence(kFsv, {1.0, 1.0}, {0.1, 0.2}, small(1000), t), BudgetError);
}

TEST(DeltaConvergence, RejectsBadGrids) {
    EXPECT_THROW(run_delta_convergence(kFsv, {1.0, 1.0}, {0.1}, small(100), loose(2)), ConfigError);
    EXPECT_THROW(run_delta_convergence(kFsv, {1.0, 1.0}, {0.1, 0.1}, small(100), loose(2)), ConfigError);
    EXPECT_THROW(run_delta_convergence(kFsv, {1.0, 1.0}, {0.1, 1.5}, small(100), loose(2)), DomainError);
    ConvergenceTargets t = loose(2);
    t.max_paths = 10;
    EXPECT_THROW(run_delta_convergence(kFsv, {1.0, 1.0}, {0.1, 0.2}, small(100), t), ConfigError);
}

TEST(DeltaConvergence, DeterministicForAFixedSeed) {
    auto run = [] { return run_delta_convergence(kFsv, {1.0, 1.0}, {0.1, 0.2}, small(1000, 99), loose(2)); };
    EXPECT_EQ(run().to_json().dump(), run().to_json().dump());
    const auto other = run_delta_convergence(kFsv, {1.0, 1.0}, {0.1, 0.2}, small(1000, 100), loose(2));
    EXPECT_NE(run().to_json().dump(), other.to_json().dump());
}

TEST(SkewPowerLaw, LayoutAndRegimeChecks) {
    const FsvModel m{0.2, 0.05, -0.5, FouParams(0.2, 1.0), TanhMap{0.1}};
    SkewOptions opt;
    opt.steps_per_min_tau = 8;
    const auto r = run_skew_powerlaw(m, {0.01, 0.1}, small(4000), opt);
    EXPECT_EQ(r.id, "skew_powerlaw_h0.2_short");
    ASSERT_EQ(r.cells.size(), 2u);
    EXPECT_EQ(r.cells[0].at("points").size(), 5u);
    for (const auto& c : r.cells) EXPECT_LT(c.at("mc_slope").get<double>(), 0.0);
    EXPECT_NEAR(r.parameters.at("first_order_exponent").get<double>(), -0.3, 0.05);

    EXPECT_THROW(run_skew_powerlaw(m, {0.01, 0.05}, small(100)), ConfigError);
    EXPECT_THROW(run_skew_powerlaw(m, {0.05, 1.0}, small(100)), ConfigError);
    EXPECT_THROW(run_skew_powerlaw(m, {0.01}, small(100)), ConfigError);
    opt.strikes_per_side = 0;
    EXPECT_THROW(run_skew_powerlaw(m, {0.01, 0.1}, small(100), opt), ConfigError);
}

TEST(PhiStatistics, SmallEnsemblePasses) {
    const auto r = run_phi_statistics(FouParams(0.3, 1.0), {0.25, 1.0}, small(4000));
    EXPECT_EQ(r.criteria.size(), 5u);
    EXPECT_TRUE(r.passed()) << r.to_json().dump(1);
}

TEST(Suite, NamesAndErrors) {
    const auto names = validation_suites();
    for (const char* s : {"all", "delta", "skew", "phi"})
        EXPECT_NE(std::find(names.begin(), names.end(), s), names.end()) << s;
    EXPECT_THROW(run_validation_suite("bogus", 7), ConfigError);
}
