#include "qmr/campaign.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <set>

#include "qmr/acceptance.hpp"
#include "qmr/chain_metric.hpp"
#include "qmr/cube_inequality.hpp"
#include "qmr/elevator.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/hyperbolic.hpp"
#include "qmr/invariants.hpp"
#include "qmr/rng.hpp"
#include "qmr/serialize.hpp"

namespace qmr {

namespace {

namespace fs = std::filesystem;

template <typename T>
T param(const json& p, const char* key, T fallback) {
    return p.contains(key) ? p[key].get<T>() : fallback;
}

GroupActionModel group_param(const json& p) {
    if (!p.contains("group")) throw ConfigError("stage needs a 'group' parameter");
    return model_from_spec(p["group"].get<std::string>());
}

// Specs without their own seed take the stage seed.
GeneratorSpec seeded_spec(const json& j, std::uint64_t seed) {
    auto spec = spec_from_json(j);
    if (!spec.params.contains("seed")) spec.params["seed"] = seed;
    return spec;
}

FiniteMetricSpace space_param(const json& p, std::uint64_t seed) {
    if (!p.contains("generator")) throw ConfigError("stage needs a 'generator' parameter");
    const auto g = generate(seeded_spec(p["generator"], seed));
    if (!std::holds_alternative<FiniteMetricSpace>(g)) throw ConfigError("generator does not produce a metric space");
    return std::get<FiniteMetricSpace>(g);
}

}  // namespace

std::vector<std::string> campaign_ops() {
    return {"generate", "invariants", "criterion", "cube_fuzz", "desnowflake", "orbit", "entropy",
            "four_point_delta", "visual", "elevator", "limit_dimension"};
}

void validate_campaign(const json& config) {
    if (!config.is_object()) throw ConfigError("campaign config must be a JSON object");
    if (!config.contains("schema") || config["schema"] != kSchemaVersion)
        throw ConfigError("campaign config needs \"schema\": 1");
    if (!config.contains("seed") || !config["seed"].is_number_integer())
        throw ConfigError("campaign config needs an integer seed");
    if (!config.contains("pipeline") || !config["pipeline"].is_array())
        throw ConfigError("campaign config needs a pipeline array");
    const auto ops = campaign_ops();
    std::set<std::string> names;
    for (const auto& st : config["pipeline"]) {
        if (!st.contains("name") || !st.contains("op")) throw ConfigError("every stage needs a name and an op");
        const auto name = st["name"].get<std::string>();
        const auto op = st["op"].get<std::string>();
        if (std::find(ops.begin(), ops.end(), op) == ops.end())
            throw ConfigError("stage '" + name + "' uses unknown op '" + op + "'");
        if (name.empty() || name.find_first_of("/\\") != std::string::npos)
            throw ConfigError("stage name '" + name + "' is not a plain file name");
        for (const auto& dep : st.value("depends_on", json::array()))
            if (!names.count(dep.get<std::string>()))
                throw ConfigError("stage '" + name + "' depends on unknown or later stage " + dep.dump());
        if (!names.insert(name).second) throw ConfigError("duplicate stage name '" + name + "'");
    }
}

json run_stage(const std::string& op, const json& p, std::uint64_t seed) {
    json out;
    if (op == "generate") {
        const auto g = generate(seeded_spec(p, seed));
        const json prov = {{"spec", p}};
        if (auto* s = std::get_if<FiniteMetricSpace>(&g)) out = space_to_json(*s, prov);
        if (auto* m = std::get_if<GroupActionModel>(&g)) out = model_to_json(*m, prov);
        if (auto* b = std::get_if<BoundarySample>(&g)) out = boundary_to_json(*b, prov);
        out["passed"] = true;
    } else if (op == "invariants") {
        const auto s = run_invariants(p.at("module").get<std::string>(), seed);
        out = s.to_json();
    } else if (op == "criterion") {
        const auto c = run_criterion(p.at("id").get<std::string>(), seed);
        out = envelope("criterion", {{"id", c.id}, {"seed", seed}});
        out["id"] = c.id;
        out["title"] = c.title;
        out["summary"] = c.summary;
        out["details"] = c.details;
        out["passed"] = c.passed;
    } else if (op == "cube_fuzz") {
        const auto f = fuzz_length_volume(param(p, "n", 2), param<std::size_t>(p, "instances", 100),
                                          param<std::size_t>(p, "max_sets", 200), seed);
        out = to_json(f);
        out["passed"] = f.violations == 0;
    } else if (op == "desnowflake") {
        const auto X = space_param(p, seed);
        const auto r = desnowflake(X, param(p, "eps", 1.0), param(p, "kmin", 0), param(p, "kmax", 40),
                                   param<std::size_t>(p, "pairs", 200), seed);
        out = to_json(r);
        out["passed"] = r.path_lower_bound_holds && (!p.contains("max_band_ratio") ||
                                                     r.band_ratio() <= p["max_band_ratio"].get<double>());
    } else if (op == "orbit") {
        out = orbit_to_json(orbit_ball(group_param(p), param(p, "R", 8.0)));
        out["passed"] = !out["truncated"].get<bool>();
    } else if (op == "entropy") {
        const auto orbit = orbit_ball(group_param(p), param(p, "R", 8.0));
        const auto w = param(p, "window", std::vector<double>{orbit.R / 2, orbit.R});
        if (w.size() != 2) throw ConfigError("window must be [lo, hi]");
        const auto e = entropy(orbit, w[0], w[1]);
        out = to_json(e);
        bool ok = true;
        if (p.contains("expect")) ok = std::abs(e.slope - p["expect"].get<double>()) <= param(p, "tolerance", 0.15);
        if (p.contains("max_slope")) ok = ok && e.slope <= p["max_slope"].get<double>();
        out["passed"] = ok;
    } else if (op == "four_point_delta") {
        const auto X = space_param(p, seed);
        const auto d = four_point_delta(gromov_products(X, 0), seed);
        out = to_json(d);
        out["passed"] = !p.contains("max_delta") || d.delta <= p["max_delta"].get<double>();
    } else if (op == "visual") {
        const auto m = group_param(p);
        const auto ls = limit_set_sample(m, param<std::size_t>(p, "depth", 4), seed);
        std::vector<Vec> pts;
        const std::size_t want = std::min<std::size_t>(param<std::size_t>(p, "points", 150), ls.points.size());
        for (std::size_t i = 0; i < want; ++i) pts.push_back(ls.points[i * ls.points.size() / want]);
        const auto v = visual_metric(analytic_boundary_sample(m, pts), param(p, "eps", 0.5));
        out = to_json(v, param(p, "matrices", false));
        out["passed"] = v.upper_holds && (!v.applicable || v.lower_holds);
    } else if (op == "elevator") {
        const auto m = group_param(p);
        const double t = param(p, "p", 0.0);
        const double r = param(p, "r", 0.01), L = param(p, "L", 8.0);
        const auto sample = elevator_sample({std::cos(t), std::sin(t)}, r, L, param<std::size_t>(p, "global", 300), seed);
        const auto c = conformal_elevator(m, sample, 0, r, L, param<std::size_t>(p, "budget", 3));
        out = to_json(c);
        out["passed"] = std::isfinite(c.C_i) && std::isfinite(c.C_ii) && c.c_iii > 0.0;
    } else if (op == "limit_dimension") {
        const auto m = group_param(p);
        std::vector<double> radii = param(p, "radii", std::vector<double>{});
        if (radii.empty())
            for (int i = 0; i <= 12; ++i) radii.push_back(std::pow(2.0, -2.0 - 0.5 * i));
        const auto f = limit_set_dimension(m, param<std::size_t>(p, "depth", 8), radii, seed);
        out = to_json(f);
        out["passed"] = f.resolved_count >= 3;
    } else {
        throw ConfigError("unknown op '" + op + "'");
    }
    out["stage_seed"] = seed;
    return out;
}

CampaignResult run_campaign(const json& config, const std::string& out_dir_override) {
    validate_campaign(config);
    const std::string dir = !out_dir_override.empty() ? out_dir_override : config.value("output_dir", std::string("campaign_out"));
    fs::create_directories(dir);
    const auto base_seed = config["seed"].get<std::uint64_t>();

    CampaignResult res;
    json manifest = envelope("manifest", {{"config_hash", hex64(fnv1a64(config.dump()))}});
    manifest["seed"] = base_seed;
    manifest["stages"] = json::array();
    std::map<std::string, bool> ok_by_name;
    std::size_t index = 0;
    for (const auto& st : config["pipeline"]) {
        const auto name = st["name"].get<std::string>();
        const auto op = st["op"].get<std::string>();
        const json params = st.value("params", json::object());
        const std::uint64_t seed = params.contains("seed") && op != "generate"
                                       ? params["seed"].get<std::uint64_t>()
                                       : Rng::derive(base_seed, index);
        ++index;
        json entry = {{"name", name}, {"op", op}, {"seed", seed}, {"passed", false}};
        bool deps_ok = true;
        for (const auto& dep : st.value("depends_on", json::array())) deps_ok = deps_ok && ok_by_name[dep.get<std::string>()];
        if (!deps_ok) {
            entry["status"] = "skipped";
            entry["error"] = "a dependency failed";
            ok_by_name[name] = false;
            manifest["stages"].push_back(entry);
            res.exit_code = 1;
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const json report = run_stage(op, params, seed);
            const std::string text = dump(report);
            const std::string file = name + ".json";
            write_file((fs::path(dir) / file).string(), text);
            entry["status"] = "ok";
            entry["passed"] = report.value("passed", false);
            entry["output"] = file;
            entry["hash"] = hex64(fnv1a64(text));
        } catch (const std::exception& e) {
            entry["status"] = "failed";
            entry["error"] = e.what();
        }
        entry["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = entry["status"] == "ok" && entry["passed"].get<bool>();
        ok_by_name[name] = ok;
        if (!ok) res.exit_code = 1;
        manifest["stages"].push_back(entry);
    }
    manifest["exit_code"] = res.exit_code;
    write_file((fs::path(dir) / "manifest.json").string(), dump(manifest));
    res.manifest = std::move(manifest);
    return res;
}

}  // namespace qmr
