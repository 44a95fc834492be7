// File formats and JSON echoes: round trips, schema errors with line and
// field, sidecar manifests.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fracvol/errors.hpp"
#include "fracvol/io.hpp"
#include "fracvol/serialize.hpp"

using namespace fracvol;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("fracvol_io_" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

CsvTable parse(const std::string& text) {
    std::istringstream is(text);
    return parse_csv(is);
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

template <class F>
SchemaError schema_error(F&& f) {
    try {
        f();
    } catch (const SchemaError& e) {
        return e;
    }
    ADD_FAILURE() << "expected SchemaError";
    return SchemaError("none", 0, "");
}

const FsvModel kModel{0.2, 0.1, -0.5, FouParams(0.3, 1.0), TanhMap{0.19}};

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::exp(u(rng)) * (i % 2 ? -1 : 1);
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(NAN), "nan");
}

TEST(Csv, HeaderNotesAndRowsRoundTrip) {
    CsvTable t;
    t.header = Json{{"tool", "fracvol"}, {"seed", 7}};
    t.notes = {"a: first column"};
    t.columns = {"a", "b"};
    t.rows = {{"1", "2.5"}, {"3", "-4e-07"}};
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "# {\"tool\":\"fracvol\",\"seed\":7}\n# a: first column\na,b\n1,2.5\n3,-4e-07\n");
    const CsvTable back = parse(os.str());
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.notes, t.notes);
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.header_line, 3u);
    EXPECT_EQ(back.row_lines, (std::vector<std::size_t>{4, 5}));
    EXPECT_EQ(back.number(1, 1), -4e-7);
}

TEST(Csv, ToleratesCrlfBlankLinesAndPadding) {
    const CsvTable t = parse("a , b\r\n\r\n 1, 2 \r\n");
    EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.number(0, 1), 2.0);
}

TEST(Csv, SchemaErrorsCarryLineAndField) {
    auto e = schema_error([] { parse("# {\"x\":1}\ntau,iv\n1,0.2\n2\n"); });
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.field(), "iv");

    const CsvTable t = parse("tau,iv\n1,0.2\n2,abc\n");
    e = schema_error([&] { t.number(1, t.column("iv")); });
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "iv");
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);

    e = schema_error([&] { t.column("strike"); });
    EXPECT_EQ(e.field(), "strike");
    EXPECT_EQ(e.line(), 1u);

    e = schema_error([] { parse("tau,tau\n1,2\n"); });
    EXPECT_EQ(e.field(), "tau");
    EXPECT_THROW(parse("# only a comment\n"), SchemaError);
    EXPECT_THROW(parse("tau,iv\n"), SchemaError);
    e = schema_error([] { parse("# {broken\ntau\n1\n"); });
    EXPECT_EQ(e.line(), 1u);
    EXPECT_THROW(parse("tau\ninf\n").number(0, 0), SchemaError);
}

TEST(Csv, FileWriteAddsSidecarManifest) {
    TempDir d;
    CsvTable t;
    t.header = Json{{"tool", "fracvol"}};
    t.columns = {"x"};
    t.rows = {{"1"}, {"2"}};
    const std::string p = d.file("t.csv");
    write_csv(p, t);
    const Json m = read_json(p + ".json");
    EXPECT_EQ(m.at("tool"), "fracvol");
    EXPECT_EQ(m.at("rows"), 2);
    EXPECT_EQ(m.at("columns"), Json::array({"x"}));
    EXPECT_EQ(read_csv(p).rows, t.rows);

    write_csv(d.file("bare.csv"), t, false);
    EXPECT_FALSE(fs::exists(d.file("bare.csv.json")));
    EXPECT_THROW(read_csv(d.file("missing.csv")), SchemaError);
}

TEST(Json, ParseErrorsReportTheLine) {
    TempDir d;
    write_text(d.file("bad.json"), "{\n  \"a\": 1,\n  \"b\": ]\n}\n");
    const auto e = schema_error([&] { read_json(d.file("bad.json")); });
    EXPECT_EQ(e.line(), 3u);
}

TEST(Surface, CsvRoundTripIsExact) {
    TempDir d;
    VolSurface s = generate_surface(kModel, MarketState{0.0, 100.0, 0.0}, {0.1, 0.5, 2.0}, {-0.1, 0.0, 0.1});
    s.points[4].clipped = true;
    write_csv(d.file("s.csv"), surface_table(s, Json{{"tool", "fracvol"}}));
    const VolSurface back = read_surface(d.file("s.csv"));
    EXPECT_EQ(back.spot, 100.0);
    ASSERT_EQ(back.points.size(), s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        EXPECT_EQ(back.points[i].tau, s.points[i].tau);
        EXPECT_EQ(back.points[i].log_moneyness, s.points[i].log_moneyness);
        EXPECT_EQ(back.points[i].iv, s.points[i].iv);
        EXPECT_EQ(back.points[i].clipped, s.points[i].clipped);
    }
}

TEST(Surface, LevelColumnIsOptional) {
    const VolSurface s = generate_surface(kModel, {}, {0.5}, {0.0});
    const CsvTable t = surface_table(s, Json::object(), [](double tau) { return tau; });
    EXPECT_EQ(t.columns.back(), "level");
    EXPECT_EQ(t.rows[0].back(), "0.5");
}

TEST(Surface, TableValidation) {
    auto e = schema_error([] { surface_from_table(parse("tau,log_moneyness,iv\n1,0,0.2\n-1,0,0.2\n")); });
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "tau");
    e = schema_error([] { surface_from_table(parse("tau,log_moneyness,iv\n1,0,0.2\n1,0,0.3\n")); });
    EXPECT_EQ(e.field(), "log_moneyness");
    e = schema_error([] { surface_from_table(parse("tau,iv\n1,0.2\n")); });
    EXPECT_EQ(e.field(), "log_moneyness");
    e = schema_error([] { surface_from_table(parse("tau,log_moneyness,iv,clipped\n1,0,0.2,yes\n")); });
    EXPECT_EQ(e.field(), "clipped");
    e = schema_error([] { surface_from_table(parse("# {\"spot\":\"x\"}\ntau,log_moneyness,iv\n1,0,0.2\n")); });
    EXPECT_EQ(e.field(), "spot");
}

TEST(Surface, QuotesAcceptStrikesOrLogMoneyness) {
    const Json j = Json::parse(R"({"spot": 100, "quotes": [
        {"tau": 0.5, "strike": 110, "iv": 0.21},
        {"tau": 0.5, "log_moneyness": 0, "iv": 0.2}]})");
    const VolSurface s = surface_from_quotes(j);
    EXPECT_EQ(s.spot, 100.0);
    EXPECT_DOUBLE_EQ(s.points[0].log_moneyness, std::log(1.1));
    EXPECT_EQ(s.points[1].iv, 0.2);

    auto e = schema_error([] { surface_from_quotes(Json::parse(R"({"quotes": [{"tau": 1, "strike": 1}]})")); });
    EXPECT_EQ(e.field(), "quotes[0].iv");
    e = schema_error([] { surface_from_quotes(Json::parse(R"({"quotes": [{"tau": 1, "strike": -1, "iv": 0.2}]})")); });
    EXPECT_EQ(e.field(), "quotes[0].strike");
    EXPECT_THROW(surface_from_quotes(Json::parse(R"({"quotes": []})")), SchemaError);
    EXPECT_THROW(surface_from_quotes(Json::parse(R"([1, 2])")), SchemaError);
}

TEST(Scenario, TableRoundTrip) {
    PathGrid g;
    g.n_steps = 32;
    const auto sc = simulate_asset(kModel, g, 11, 1.0);
    const CsvTable t = scenario_table(sc, Json{{"tool", "fracvol"}});
    EXPECT_EQ(t.header.at("seed"), 11);
    std::ostringstream os;
    write_csv(os, t);
    const ScenarioColumns c = scenario_from_table(parse(os.str()));
    ASSERT_EQ(c.x.size(), 33u);
    for (std::size_t i = 0; i < 32; ++i) {
        EXPECT_EQ(c.dW[i], sc.dW[i]);
        EXPECT_EQ(c.dB[i], sc.dB[i]);
    }
    for (std::size_t i = 0; i <= 32; ++i) {
        EXPECT_EQ(c.t[i], g.node(i));
        EXPECT_EQ(c.z[i], sc.z_path[i]);
        EXPECT_EQ(c.sigma[i], sc.sigma_path[i]);
        EXPECT_EQ(c.x[i], sc.x_path[i]);
    }
    EXPECT_THROW(scenario_from_table(parse("step,t,dW,dB,Z,sigma,X\n1,0,0,0,0,0.2,1\n")), SchemaError);
}

TEST(Calibration, JsonCarriesParametersSlicesAndFlags) {
    const VolSurface s = generate_surface(kModel, {}, {0.05, 0.2, 1, 5, 20}, {-0.1, 0.0, 0.1});
    const CalibratedParams p = fit_params(s);
    const Json j = calibration_json(p, s);
    EXPECT_EQ(j.at("parameters").at("H"), p.hurst.value());
    EXPECT_EQ(j.at("slices").size(), 5u);
    EXPECT_EQ(j.at("residuals").size(), 15u);
    EXPECT_TRUE(j.at("identifiability").at("delta_rho_product_only").get<bool>());
    EXPECT_EQ(j.at("regimes").at("short_maturities"), p.flags.n_short_regime);
}

TEST(Serialize, ModelRoundTrip) {
    const FsvModel back = fsv_model_from_json(to_json(kModel));
    EXPECT_EQ(back.sigma_bar, kModel.sigma_bar);
    EXPECT_EQ(back.delta, kModel.delta);
    EXPECT_EQ(back.rho, kModel.rho);
    EXPECT_EQ(back.fou.H(), kModel.fou.H());
    EXPECT_EQ(back.fou.a, kModel.fou.a);
    EXPECT_EQ(back.f.c, kModel.f.c);

    const SlowFsvModel slow{0.04, -0.5, FouParams(0.7, 2.0), SlowTanhMap{0.05, 0.15}, 0.3};
    const SlowFsvModel sb = slow_model_from_json(to_json(slow));
    EXPECT_EQ(sb.delta, slow.delta);
    EXPECT_EQ(sb.fou.H(), 0.7);
    EXPECT_EQ(sb.f.sigma_min, 0.05);
    EXPECT_EQ(sb.z0, 0.3);
}

TEST(Serialize, MissingOrMistypedFieldsAreSchemaErrors) {
    Json j = to_json(kModel);
    j.erase("rho");
    EXPECT_EQ(schema_error([&] { fsv_model_from_json(j); }).field(), "rho");
    j = to_json(kModel);
    j["H"] = "0.3";
    EXPECT_EQ(schema_error([&] { fsv_model_from_json(j); }).field(), "H");
    EXPECT_THROW(fsv_model_from_json(Json::array()), SchemaError);
    j = to_json(kModel);
    j["rho"] = 2.0;
    EXPECT_THROW(fsv_model_from_json(j), DomainError);
}

TEST(Serialize, HistoryModeStrings) {
    for (auto m : {HistoryMode::stationary, HistoryMode::flat, HistoryMode::fixed})
        EXPECT_EQ(history_mode_from_string(to_string(m)), m);
    EXPECT_THROW(history_mode_from_string("warm"), ConfigError);
}

TEST(Serialize, ConfigEchoes) {
    McConfig c;
    c.n_paths = 500;
    const Json j = to_json(c);
    EXPECT_EQ(j.at("n_paths"), 500);
    EXPECT_EQ(j.at("history"), to_string(c.history));
    EXPECT_EQ(to_json(PathGrid{}).at("n_steps"), 256);
}
