#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qmr {

/// Outcome of one acceptance criterion. `details` is deterministic per seed;
/// wall time lives in `seconds` only.
struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string summary;
    nlohmann::json details = nlohmann::json::object();
    double seconds = 0.0;
};

/// "1", "2", "3a", "3b", "4", ..., "8". Criterion 9 needs a campaign config
/// and goes through criterion_invariants().
std::vector<std::string> criterion_ids();

CriterionResult run_criterion(const std::string& id, std::uint64_t seed);

/// Runs the campaign at `config_path` into `out_dir`; passes when every
/// stage is an invariants stage, all pass, and the exit code is 0.
CriterionResult criterion_invariants(const std::string& config_path, const std::string& out_dir);

}  // namespace qmr
