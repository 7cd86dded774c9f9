#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qmr {

/// Config: {"schema": 1, "seed": s, "output_dir": dir, "pipeline": [stage...]}
/// with stage = {"name", "op", "params", "depends_on": [names]}.
/// Throws ConfigError on unknown ops, missing seed, duplicate or dangling names.
void validate_campaign(const nlohmann::json& config);

std::vector<std::string> campaign_ops();

struct CampaignResult {
    nlohmann::json manifest;
    int exit_code = 0;  ///< 0 only when every stage ran and passed
};

/// Runs stages in order. A failing stage is recorded in the manifest and its
/// dependents are skipped; independent stages still run. Each stage writes
/// <name>.json; the manifest (manifest.json) carries hashes, seeds and wall times.
CampaignResult run_campaign(const nlohmann::json& config, const std::string& out_dir_override = "");

/// Report of one stage (deterministic per seed). Sets "passed".
nlohmann::json run_stage(const std::string& op, const nlohmann::json& params, std::uint64_t seed);

}  // namespace qmr
