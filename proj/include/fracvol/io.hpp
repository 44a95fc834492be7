#pragma once
/// @file io.hpp
/// File formats. Tables are CSV: a first comment line "# {json}" carrying
/// the provenance header, optional "# ..." lines documenting columns, then a
/// header row and data rows. Every CSV gets a sidecar "<file>.json"
/// manifest holding the same header. Numbers are written in shortest
/// round-trip form, so identical runs produce identical bytes.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracvol/calibrate.hpp"
#include "fracvol/implied_vol.hpp"
#include "fracvol/pricing.hpp"
#include "fracvol/simulate.hpp"
#include "fracvol/validate.hpp"

namespace fracvol {

using Json = nlohmann::ordered_json;

std::string format_number(double v);

struct CsvTable {
    Json header = Json::object();
    std::vector<std::string> notes;  ///< extra comment lines, without "# "
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::size_t header_line = 0;         ///< 1-based line of the column row, filled by parse_csv
    std::vector<std::size_t> row_lines;  ///< 1-based source lines of the data rows

    /// Index of a column; SchemaError naming the field when absent.
    std::size_t column(const std::string& name) const;
    /// Cell parsed as a finite number; SchemaError with line and field otherwise.
    double number(std::size_t row, std::size_t col) const;
};

/// Writes the table and, unless disabled, the sidecar manifest. An empty
/// path writes the CSV to stdout.
void write_csv(const std::string& path, const CsvTable& t, bool manifest = true);
void write_csv(std::ostream& os, const CsvTable& t);
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& is);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

/// tau, log_moneyness, iv, clipped, plus a level column (the smile's value
/// at log-moneyness 0) when a level curve is supplied.
CsvTable surface_table(const VolSurface& s, const Json& provenance,
                       const std::function<double(double)>& level = {});
/// Requires tau, log_moneyness and iv; clipped is optional. Spot and as-of
/// come from the JSON header when present.
VolSurface surface_from_table(const CsvTable& t);
/// {"spot": x, "as_of": t, "quotes": [{"tau", "log_moneyness" | "strike", "iv"}]}
VolSurface surface_from_quotes(const Json& j);
/// Dispatches on the extension: .json is a quote list, anything else CSV.
VolSurface read_surface(const std::string& path);

/// step, t, dW, dB, Z, sigma, X
CsvTable scenario_table(const SimulatedScenario& s, const Json& provenance);

struct ScenarioColumns {
    std::vector<double> t, dW, dB, z, sigma, x;
};
ScenarioColumns scenario_from_table(const CsvTable& t);

struct PriceRow {
    double strike;
    double maturity;
    PriceBreakdown price;
};
/// K, T, q0, random_term, skew_term, total
CsvTable price_table(const std::vector<PriceRow>& rows, const Json& provenance);

/// Parameters, per-point residuals, maturity slices, regime counts and
/// identifiability flags.
Json calibration_json(const CalibratedParams& p, const VolSurface& s);

/// One row per cell, columns taken from the union of the cells' scalar keys.
CsvTable report_cells_table(const ExperimentReport& r, const Json& provenance);

}  // namespace fracvol
