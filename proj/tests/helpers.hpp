#pragma once

#include <string>

#include "xcir/scenario.hpp"

namespace testutil {

inline std::string scenario_path(const std::string& name) {
    return std::string(XCIR_SCENARIO_DIR) + "/" + name;
}

inline xcir::ScenarioConfig load_fixture(const std::string& name) {
    return xcir::load_scenario(scenario_path(name));
}

} // namespace testutil
