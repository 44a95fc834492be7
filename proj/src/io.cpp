#include "fracvol/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "fracvol/errors.hpp"

namespace fracvol {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw SchemaError("missing required column", header_line, name);
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::size_t line = row < row_lines.size() ? row_lines[row] : 0;
    const std::string& cell = rows.at(row).at(col);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw SchemaError("expected a finite number, got '" + cell + "'", line, columns.at(col));
    return v;
}

void write_csv(std::ostream& os, const CsvTable& t) {
    os << "# " << t.header.dump() << '\n';
    for (const auto& n : t.notes) os << "# " << n << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << j.dump(2) << '\n';
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

void write_csv(const std::string& path, const CsvTable& t, bool manifest) {
    if (path.empty()) {
        write_csv(std::cout, t);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    write_csv(f, t);
    if (!f) throw ConfigError("failed writing '" + path + "'");
    if (manifest) {
        Json m = t.header;
        m["data_file"] = path;
        m["columns"] = t.columns;
        m["rows"] = t.rows.size();
        write_json(path + ".json", m);
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable parse_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    bool have_header_row = false;
    bool first_comment = true;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            if (first_comment && !have_header_row && !body.empty() && body[0] == '{') {
                try {
                    t.header = Json::parse(body);
                } catch (const Json::exception& e) {
                    throw SchemaError(std::string("header comment is not valid JSON: ") + e.what(), n, "header");
                }
            } else {
                t.notes.push_back(body);
            }
            first_comment = false;
            continue;
        }
        first_comment = false;
        auto cells = split(line);
        if (!have_header_row) {
            t.columns = std::move(cells);
            std::set<std::string> seen;
            for (const auto& c : t.columns)
                if (c.empty() || !seen.insert(c).second) throw SchemaError("empty or duplicate column name", n, c);
            have_header_row = true;
            t.header_line = n;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            std::ostringstream os;
            os << "expected " << t.columns.size() << " fields, found " << cells.size();
            throw SchemaError(os.str(), n, cells.size() < t.columns.size() ? t.columns[cells.size()] : "");
        }
        t.rows.push_back(std::move(cells));
        t.row_lines.push_back(n);
    }
    if (!have_header_row) throw SchemaError("no header row", n, "");
    if (t.rows.empty()) throw SchemaError("no data rows", t.header_line, "");
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot open '" + path + "'", 0, "");
    return parse_csv(f);
}

Json read_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot open '" + path + "'", 0, "");
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        // byte offsets are what the parser knows; report the line they fall on
        std::ifstream g(path, std::ios::binary);
        std::size_t line = 1, pos = 0;
        char ch;
        while (pos + 1 < e.byte && g.get(ch)) {
            ++pos;
            if (ch == '\n') ++line;
        }
        throw SchemaError(std::string("invalid JSON: ") + e.what(), line, "");
    }
}

CsvTable surface_table(const VolSurface& s, const Json& provenance, const std::function<double(double)>& level) {
    CsvTable t;
    t.header = provenance;
    t.header["spot"] = s.spot;
    t.header["as_of"] = s.as_of;
    t.notes = {"tau: time to maturity in years; log_moneyness: log(K/x); iv: implied volatility",
               "clipped: 1 when the formula value fell below the floor and was raised to it"};
    t.columns = {"tau", "log_moneyness", "iv", "clipped"};
    if (level) {
        t.notes.push_back("level: implied volatility at log_moneyness 0 for the same maturity");
        t.columns.push_back("level");
    }
    for (const auto& p : s.points) {
        std::vector<std::string> r{format_number(p.tau), format_number(p.log_moneyness), format_number(p.iv),
                                   p.clipped ? "1" : "0"};
        if (level) r.push_back(format_number(level(p.tau)));
        t.rows.push_back(std::move(r));
    }
    return t;
}

namespace {

double header_number(const Json& h, const char* key, double fallback) {
    if (!h.contains(key)) return fallback;
    if (!h.at(key).is_number()) throw SchemaError("header value must be a number", 1, key);
    return h.at(key).get<double>();
}

void check_point(const VolPoint& p, std::size_t line, const std::string& prefix,
                 std::set<std::pair<double, double>>& seen) {
    if (!(p.tau > 0.0)) throw SchemaError("maturity must be positive", line, prefix + "tau");
    if (!(p.iv > 0.0)) throw SchemaError("implied volatility must be positive", line, prefix + "iv");
    if (!seen.insert({p.tau, p.log_moneyness}).second)
        throw SchemaError("duplicate (tau, log_moneyness) point", line, prefix + "log_moneyness");
}

}  // namespace

VolSurface surface_from_table(const CsvTable& t) {
    VolSurface s;
    s.spot = header_number(t.header, "spot", 1.0);
    s.as_of = header_number(t.header, "as_of", 0.0);
    if (!(s.spot > 0.0)) throw SchemaError("spot must be positive", 1, "spot");
    const std::size_t ct = t.column("tau"), cm = t.column("log_moneyness"), ci = t.column("iv");
    std::optional<std::size_t> cc;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == "clipped") cc = i;
    std::set<std::pair<double, double>> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        VolPoint p{t.number(r, ct), t.number(r, cm), t.number(r, ci), false};
        if (cc) {
            const std::string& v = t.rows[r][*cc];
            if (v != "0" && v != "1") throw SchemaError("clipped must be 0 or 1", t.row_lines[r], "clipped");
            p.clipped = v == "1";
        }
        check_point(p, t.row_lines[r], "", seen);
        s.points.push_back(p);
    }
    return s;
}

VolSurface surface_from_quotes(const Json& j) {
    if (!j.is_object()) throw SchemaError("quote file must be a JSON object", 0, "");
    VolSurface s;
    s.spot = header_number(j, "spot", 1.0);
    s.as_of = header_number(j, "as_of", 0.0);
    if (!(s.spot > 0.0)) throw SchemaError("spot must be positive", 0, "spot");
    if (!j.contains("quotes") || !j.at("quotes").is_array()) throw SchemaError("missing quote list", 0, "quotes");
    std::set<std::pair<double, double>> seen;
    const Json& q = j.at("quotes");
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::string base = "quotes[" + std::to_string(i) + "].";
        auto num = [&](const char* key) {
            if (!q[i].contains(key) || !q[i].at(key).is_number()) throw SchemaError("missing or non-numeric", 0, base + key);
            return q[i].at(key).get<double>();
        };
        VolPoint p{};
        p.tau = num("tau");
        p.iv = num("iv");
        if (q[i].contains("log_moneyness")) {
            p.log_moneyness = num("log_moneyness");
        } else {
            const double k = num("strike");
            if (!(k > 0.0)) throw SchemaError("strike must be positive", 0, base + "strike");
            p.log_moneyness = std::log(k / s.spot);
        }
        check_point(p, 0, base, seen);
        s.points.push_back(p);
    }
    if (s.points.empty()) throw SchemaError("empty quote list", 0, "quotes");
    return s;
}

VolSurface read_surface(const std::string& path) {
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return json ? surface_from_quotes(read_json(path)) : surface_from_table(read_csv(path));
}

CsvTable scenario_table(const SimulatedScenario& s, const Json& provenance) {
    CsvTable t;
    t.header = provenance;
    t.header["seed"] = s.seed;
    t.header["path_id"] = s.path_id;
    t.header["kernel"] = s.kernel;
    t.notes = {"row i holds the node t_i and the increments over [t_i, t_i+1]; the last row has no increments",
               "sigma is frozen over each step; X is the asset at t_i"};
    t.columns = {"step", "t", "dW", "dB", "Z", "sigma", "X"};
    const std::size_t n = s.grid.n_steps;
    for (std::size_t i = 0; i <= n; ++i)
        t.rows.push_back({std::to_string(i), format_number(s.grid.node(i)), i < n ? format_number(s.dW[i]) : "0",
                          i < n ? format_number(s.dB[i]) : "0", format_number(s.z_path[i]),
                          format_number(s.sigma_path[i]), format_number(s.x_path[i])});
    return t;
}

ScenarioColumns scenario_from_table(const CsvTable& t) {
    ScenarioColumns c;
    const std::size_t cs = t.column("step"), ct = t.column("t"), cw = t.column("dW"), cb = t.column("dB"),
                      cz = t.column("Z"), cv = t.column("sigma"), cx = t.column("X");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.number(r, cs) != static_cast<double>(r)) throw SchemaError("steps must count from 0", t.row_lines[r], "step");
        c.t.push_back(t.number(r, ct));
        c.dW.push_back(t.number(r, cw));
        c.dB.push_back(t.number(r, cb));
        c.z.push_back(t.number(r, cz));
        c.sigma.push_back(t.number(r, cv));
        c.x.push_back(t.number(r, cx));
    }
    return c;
}

CsvTable price_table(const std::vector<PriceRow>& rows, const Json& provenance) {
    CsvTable t;
    t.header = provenance;
    t.notes = {"K: strike; T: maturity (years); q0: Black-Scholes price at the effective volatility",
               "random_term: correction from the conditional factor; skew_term: leverage correction"};
    t.columns = {"K", "T", "q0", "random_term", "skew_term", "total"};
    for (const auto& r : rows)
        t.rows.push_back({format_number(r.strike), format_number(r.maturity), format_number(r.price.q0),
                          format_number(r.price.random_term), format_number(r.price.skew_term),
                          format_number(r.price.total)});
    return t;
}

Json calibration_json(const CalibratedParams& p, const VolSurface& s) {
    Json j;
    j["parameters"] = Json{{"sigma_bar", p.sigma_bar}, {"H", p.hurst.value()}, {"delta_rho", p.delta_rho}, {"a", p.a}};
    j["fit"] = Json{{"objective", p.objective},
                    {"residual_rms", p.residual_rms},
                    {"converged", p.converged},
                    {"best_start", p.best_start},
                    {"iterations", p.iterations},
                    {"objective_trace_length", p.objective_trace.size()}};
    Json curve = Json::array();
    for (const auto& [tau, v] : p.effective_vol_curve) curve.push_back(Json{{"tau", tau}, {"sigma_eff", v}});
    j["effective_vol_curve"] = std::move(curve);
    Json slices = Json::array();
    for (const auto& m : p.slices)
        slices.push_back(Json{{"tau", m.tau},
                              {"a_tau", p.a * m.tau},
                              {"points", m.n},
                              {"level", m.level},
                              {"slope", m.slope},
                              {"slope_se", m.slope_se},
                              {"rss", m.rss}});
    j["slices"] = std::move(slices);
    Json res = Json::array();
    for (std::size_t i = 0; i < s.points.size() && i < p.residuals.size(); ++i)
        res.push_back(Json{{"tau", s.points[i].tau},
                           {"log_moneyness", s.points[i].log_moneyness},
                           {"iv", s.points[i].iv},
                           {"residual", p.residuals[i]}});
    j["residuals"] = std::move(res);
    j["regimes"] = Json{{"short_maturities", p.flags.n_short_regime}, {"long_maturities", p.flags.n_long_regime}};
    j["identifiability"] = Json{{"skew_absent", p.flags.skew_absent},
                                {"hurst_unidentified", p.flags.hurst_unidentified},
                                {"a_unidentified", p.flags.a_unidentified},
                                {"delta_rho_product_only", p.flags.product_only}};
    return j;
}

CsvTable report_cells_table(const ExperimentReport& r, const Json& provenance) {
    CsvTable t;
    t.header = provenance;
    t.header["experiment"] = r.id;
    std::vector<std::string> cols;
    std::set<std::string> seen;
    for (const auto& c : r.cells)
        for (const auto& [k, v] : c.items())
            if ((v.is_primitive()) && seen.insert(k).second) cols.push_back(k);
    t.columns = cols;
    for (const auto& c : r.cells) {
        std::vector<std::string> row;
        for (const auto& k : cols) {
            if (!c.contains(k)) {
                row.emplace_back();
            } else if (const Json& v = c.at(k); v.is_number()) {
                row.push_back(format_number(v.get<double>()));
            } else if (v.is_string()) {
                row.push_back(v.get<std::string>());
            } else {
                row.push_back(v.dump());
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace fracvol
