#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parapos/config.hpp"

namespace parapos {

struct ScenarioInfo {
    std::string name;
    std::string description;
};

/// Built-in scenarios in a fixed order.
std::vector<ScenarioInfo> list_scenarios();

bool is_builtin_scenario(const std::string& name);

/// The JSON document of a built-in scenario. Throws ConfigError for unknown names.
nlohmann::json builtin_document(const std::string& name);

ScenarioConfig builtin_scenario(const std::string& name);

}  // namespace parapos
