#ifndef SMCKIT_CONFIG_JSON_HPP
#define SMCKIT_CONFIG_JSON_HPP

#include <string>

#include <json.hpp>

#include "smckit/design.hpp"
#include "smckit/simgen.hpp"

namespace smckit {

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig read_scenario_file(const std::string& path);
void write_scenario_file(const std::string& path, const ScenarioConfig& cfg);

nlohmann::json recipe_to_json(const DesignRecipe& recipe);
DesignRecipe recipe_from_json(const nlohmann::json& j);

} // namespace smckit

#endif
