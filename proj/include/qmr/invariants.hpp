#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qmr {

struct InvariantCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct InvariantSuite {
    std::string module;
    std::uint64_t seed = 0;
    std::vector<InvariantCheck> checks;

    bool passed() const;
    nlohmann::json to_json() const;
};

/// Modules: metric_core, chain_metric, cube_inequality, hyperbolic_core,
/// group_actions, cli_io. Each suite runs in a few seconds; an exception
/// inside a check marks that check failed rather than aborting the suite.
InvariantSuite run_invariants(const std::string& module, std::uint64_t seed);

std::vector<std::string> invariant_modules();

}  // namespace qmr
