#pragma once

#include <nlohmann/json.hpp>

#include "mre/design.hpp"
#include "mre/groups.hpp"
#include "mre/risk.hpp"

namespace mre {

/// {"xp": [[...], ...], "reps": [...]}; other keys are ignored.
Design design_from_json(const nlohmann::json& doc);
/// {"beta": [...], "sigma2": [...]}; other keys are ignored.
ParameterPoint parameter_from_json(const nlohmann::json& doc);
SampleTransform transform_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Design& design);
nlohmann::json to_json(const ParameterPoint& theta);
nlohmann::json to_json(const SampleTransform& g);
nlohmann::json to_json(const RiskEstimate& risk);

Vector vector_from_json(const nlohmann::json& arr, const char* what);
nlohmann::json vector_to_json(const Vector& v);

}  // namespace mre
