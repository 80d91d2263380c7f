#pragma once

#include "finslerforms/config.hpp"
#include "json.hpp"

namespace finslerforms::scenarios {

nlohmann::json config_to_json(const ScenarioConfig& config);

}  // namespace finslerforms::scenarios
