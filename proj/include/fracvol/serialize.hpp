#pragma once
/// @file serialize.hpp
/// JSON echoes of models and run configurations, embedded in every output
/// artifact so a file records how it was produced.

#include <string>

#include <json.hpp>

#include "fracvol/model.hpp"
#include "fracvol/montecarlo.hpp"
#include "fracvol/simulate.hpp"

namespace fracvol {

using Json = nlohmann::ordered_json;

Json to_json(const FouParams& p);
Json to_json(const FsvModel& m);
Json to_json(const SlowFsvModel& m);
Json to_json(const PathGrid& g);
Json to_json(const McConfig& c);

/// Inverses of the model echoes; missing or mistyped fields raise SchemaError.
FsvModel fsv_model_from_json(const Json& j);
SlowFsvModel slow_model_from_json(const Json& j);

std::string to_string(HistoryMode m);
HistoryMode history_mode_from_string(const std::string& s);

}  // namespace fracvol
