#pragma once

#include <string>

#include <json.hpp>

#include "tde/types.hpp"

namespace tde {

nlohmann::json scenario_to_json(const LabeledScenario& ls);
LabeledScenario scenario_from_json(const nlohmann::json& j);

} // namespace tde
