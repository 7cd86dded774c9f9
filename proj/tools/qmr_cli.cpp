// qmr: command-line front end for the quasi-Moebius rigidity toolkit.
//
// Every command writes a JSON report (to --out, else stdout) and a one-line
// summary to stderr. Exit codes: 0 when the asserted invariants hold,
// 1 when one fails, 2 on bad input or usage.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qmr/campaign.hpp"
#include "qmr/chain_metric.hpp"
#include "qmr/cube_inequality.hpp"
#include "qmr/elevator.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/hyperbolic.hpp"
#include "qmr/mobius.hpp"
#include "qmr/serialize.hpp"

using namespace qmr;

namespace {

constexpr int kFail = 1;
constexpr int kUsage = 2;

void emit(const json& report, const std::string& out) {
    if (out.empty()) std::cout << dump(report);
    else write_file(out, dump(report));
}

int verdict(bool ok, const std::string& summary) {
    std::cerr << (ok ? "ok: " : "FAILED: ") << summary << "\n";
    return ok ? 0 : kFail;
}

std::string f(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

bool ends_with(const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

// "a:b" -> {a, b}
std::pair<double, double> parse_window(const std::string& w) {
    const auto colon = w.find(':');
    if (colon == std::string::npos) throw ParameterError("window must look like LO:HI, got '" + w + "'");
    try {
        return {std::stod(w.substr(0, colon)), std::stod(w.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ParameterError("window must look like LO:HI, got '" + w + "'");
    }
}

// key=value; values parse as JSON when they can (numbers, arrays), else as strings.
json parse_params(const std::vector<std::string>& kv) {
    json p = json::object();
    for (const auto& item : kv) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ParameterError("--param expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        json v = json::parse(value, nullptr, false);
        p[key] = v.is_discarded() ? json(value) : v;
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmr: chain metrics, cube covers, hyperbolic boundaries and Moebius group actions"};
    app.require_subcommand(1);
    std::string out;
    std::optional<std::uint64_t> seed;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a metric space, boundary sample or group model");
    std::string gen_kind, gen_format = "auto";
    std::vector<std::string> gen_params;
    gen->add_option("--kind", gen_kind, "generator kind")->required();
    gen->add_option("--param", gen_params, "kind parameter as key=value (repeatable)");
    gen->add_option("--seed", seed, "seed for stochastic kinds");
    gen->add_option("--format", gen_format, "json | csv | auto (by --out extension)");
    gen->add_option("--out", out, "output path");

    // desnowflake
    auto* ds = app.add_subcommand("desnowflake", "chain-metric recovery of d^(1/eps) from a snowflaked space");
    std::string ds_input;
    double ds_eps = 1.0;
    int ds_kmin = 0, ds_kmax = 40;
    std::size_t ds_pairs = 500;
    ds->add_option("--input", ds_input, "distance matrix (.csv or .json)")->required();
    ds->add_option("--eps", ds_eps, "snowflake exponent in (0, 1]")->required();
    ds->add_option("--kmin", ds_kmin);
    ds->add_option("--kmax", ds_kmax, "clamped to the resolved window");
    ds->add_option("--pairs", ds_pairs, "sampled pairs");
    ds->add_option("--seed", seed)->required();
    ds->add_option("--out", out);

    // cube-check
    auto* cube = app.add_subcommand("cube-check", "fuzz N >= d_1...d_n over random box covers");
    int cube_n = 2;
    std::size_t cube_instances = 1000, cube_max_sets = 200;
    std::string cube_dump;
    cube->add_option("--n", cube_n, "cube dimension (1..4)");
    cube->add_option("--instances", cube_instances);
    cube->add_option("--max-sets", cube_max_sets);
    cube->add_option("--dump", cube_dump, "write violating instances (boxes per set) here");
    cube->add_option("--seed", seed)->required();
    cube->add_option("--out", out);

    // hyperbolicity
    auto* hyp = app.add_subcommand("hyperbolicity", "four-point delta of a finite metric space");
    std::string hyp_input;
    std::size_t hyp_base = 0;
    std::optional<double> hyp_max;
    hyp->add_option("--input", hyp_input)->required();
    hyp->add_option("--base", hyp_base, "base point index");
    hyp->add_option("--max-delta", hyp_max, "fail when delta exceeds this");
    hyp->add_option("--seed", seed, "needed above 2000 points, where triples are sampled");
    hyp->add_option("--out", out);

    // visual
    auto* vis = app.add_subcommand("visual", "chain visual metric d_eps against rho = exp(-eps (.|.))");
    std::string vis_input;
    double vis_eps = 0.5;
    bool vis_matrices = false;
    vis->add_option("--gromov", vis_input, "boundary Gromov products (.csv or .json)")->required();
    vis->add_option("--eps", vis_eps)->required();
    vis->add_flag("--matrices", vis_matrices, "include rho and d_eps in the report");
    vis->add_option("--out", out);

    // orbit
    auto* orb = app.add_subcommand("orbit", "orbit ball of the base point");
    std::string group;
    double orb_R = 8.0;
    orb->add_option("--group", group, "preset (psl2z, genus2, picard, cyclic:L, schottky:s, ...) or matrix list")
        ->required();
    orb->add_option("--R", orb_R, "radius");
    orb->add_option("--out", out);

    // entropy
    auto* ent = app.add_subcommand("entropy", "growth rate of an orbit ball");
    std::string ent_orbit, ent_window;
    double ent_R = 12.0;
    std::optional<double> ent_expect;
    double ent_tol = 0.15;
    ent->add_option("--orbit", ent_orbit, "orbit report from 'orbit'");
    ent->add_option("--group", group, "enumerate the orbit here instead");
    ent->add_option("--R", ent_R, "radius when --group is used");
    ent->add_option("--window", ent_window, "fit window LO:HI (default: upper half)");
    ent->add_option("--expect", ent_expect, "fail unless |slope - expect| <= tol");
    ent->add_option("--tol", ent_tol);
    ent->add_option("--out", out);

    // elevator
    auto* elev = app.add_subcommand("elevator", "conformal elevator for B(p, r) on S^1");
    double elev_p = 0.0, elev_r = 0.01, elev_L = 8.0;
    std::size_t elev_budget = 3, elev_global = 300;
    elev->add_option("--group", group)->required();
    elev->add_option("--p", elev_p, "boundary point as an angle in radians");
    elev->add_option("--r", elev_r, "ball radius (chordal)");
    elev->add_option("--L", elev_L, "far-set scale");
    elev->add_option("--budget", elev_budget, "word length searched around the descent point");
    elev->add_option("--global", elev_global, "points sampled away from p");
    elev->add_option("--seed", seed)->required();
    elev->add_option("--out", out);

    // campaign
    auto* camp = app.add_subcommand("campaign", "run a pipeline config");
    std::string camp_config;
    camp->add_option("config", camp_config, "campaign JSON")->required();
    camp->add_option("--out", out, "output directory (overrides output_dir)");

    // plot
    auto* plot = app.add_subcommand("plot", "flat CSV view of a report");
    std::string plot_report, plot_view;
    plot->add_option("--report", plot_report)->required();
    plot->add_option("--view", plot_view)->required();
    plot->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsage;
    }

    try {
        if (*gen) {
            json params = parse_params(gen_params);
            if (seed && !params.contains("seed")) params["seed"] = *seed;
            params["kind"] = gen_kind;
            const auto g = generate(spec_from_json(params));
            const json prov = {{"spec", params}};
            const bool csv = gen_format == "csv" || (gen_format == "auto" && ends_with(out, ".csv"));
            std::string text;
            if (auto* s = std::get_if<FiniteMetricSpace>(&g)) text = csv ? space_to_csv(*s) : dump(space_to_json(*s, prov));
            if (auto* b = std::get_if<BoundarySample>(&g)) text = csv ? boundary_to_csv(*b) : dump(boundary_to_json(*b, prov));
            if (auto* m = std::get_if<GroupActionModel>(&g)) {
                if (csv) throw ParameterError("group models have no CSV form");
                text = dump(model_to_json(*m, prov));
            }
            if (out.empty()) std::cout << text;
            else write_file(out, text);
            return verdict(true, "generated " + gen_kind);
        }
        if (*ds) {
            const auto X = load_space(ds_input);
            const auto r = desnowflake(X, ds_eps, ds_kmin, ds_kmax, ds_pairs, *seed);
            emit(to_json(r), out);
            return verdict(r.path_lower_bound_holds,
                           "band [" + f(r.band_low) + ", " + f(r.band_high) + "], ratio " + f(r.band_ratio()) +
                               (r.path_lower_bound_holds ? "" : "; path lower bound violated"));
        }
        if (*cube) {
            const auto r = fuzz_length_volume(cube_n, cube_instances, cube_max_sets, *seed);
            emit(to_json(r), out);
            if (!cube_dump.empty()) {
                json dumps = json::array();
                for (const auto& c : r.falsifications) dumps.push_back(to_json(c));
                write_file(cube_dump, dump(dumps));
            }
            return verdict(r.violations == 0, std::to_string(r.violations) + " violations in " +
                                                  std::to_string(r.instances) + " covers");
        }
        if (*hyp) {
            const auto X = load_space(hyp_input);
            if (X.size() > 2000 && !seed) throw ParameterError("--seed is required above 2000 points");
            if (hyp_base >= X.size()) throw ParameterError("--base out of range");
            const auto d = four_point_delta(gromov_products(X, hyp_base), seed.value_or(0));
            emit(to_json(d), out);
            const bool ok = !hyp_max || d.delta <= *hyp_max;
            return verdict(ok, "delta " + f(d.delta) + (d.exhaustive ? " (exhaustive)" : " (sampled)"));
        }
        if (*vis) {
            const auto B = load_boundary(vis_input);
            const auto v = visual_metric(B, vis_eps);
            emit(to_json(v, vis_matrices), out);
            const bool ok = v.upper_holds && (!v.applicable || v.lower_holds);
            return verdict(ok, "K " + f(v.K) + ", d_eps/rho in [" + f(v.min_ratio) + ", " + f(v.max_ratio) + "]" +
                                   (v.applicable ? "" : " (lower bound not asserted: K > sqrt 2)"));
        }
        if (*orb) {
            const auto o = orbit_ball(model_from_spec(group), orb_R);
            const json j = orbit_to_json(o);
            emit(j, out);
            return verdict(!o.truncated, std::to_string(o.points.size()) + " orbit points within " + f(orb_R));
        }
        if (*ent) {
            OrbitBall o;
            if (!ent_orbit.empty()) o = orbit_from_json(read_json(ent_orbit));
            else if (!group.empty()) o = orbit_ball(model_from_spec(group), ent_R);
            else throw ParameterError("entropy needs --orbit or --group");
            const auto e = ent_window.empty() ? entropy(o)
                                              : [&] {
                                                    const auto [lo, hi] = parse_window(ent_window);
                                                    return entropy(o, lo, hi);
                                                }();
            emit(to_json(e), out);
            const bool ok = !ent_expect || std::abs(e.slope - *ent_expect) <= ent_tol;
            return verdict(ok, "slope " + f(e.slope) + " +- " + f(e.standard_error) + " on [" + f(e.window_lo) + ", " +
                                   f(e.window_hi) + "]");
        }
        if (*elev) {
            const auto m = model_from_spec(group);
            if (m.boundary_dim() != 1) throw ParameterError("elevator works on H^2 models only");
            const auto sample = elevator_sample({std::cos(elev_p), std::sin(elev_p)}, elev_r, elev_L, elev_global, *seed);
            const auto c = conformal_elevator(m, sample, 0, elev_r, elev_L, elev_budget);
            emit(to_json(c), out);
            const bool ok = std::isfinite(c.C_i) && std::isfinite(c.C_ii) && c.c_iii > 0.0 && std::isfinite(c.omega_iv);
            return verdict(ok, "C_i " + f(c.C_i) + ", C_ii " + f(c.C_ii) + ", c_iii " + f(c.c_iii) + ", omega_iv " +
                                   f(c.omega_iv));
        }
        if (*camp) {
            const auto res = run_campaign(read_json(camp_config), out);
            std::size_t passed = 0;
            for (const auto& st : res.manifest["stages"]) passed += st["passed"].get<bool>();
            return verdict(res.exit_code == 0, std::to_string(passed) + "/" +
                                                   std::to_string(res.manifest["stages"].size()) + " stages passed");
        }
        if (*plot) {
            const std::string csv = emit_plot_data(read_json(plot_report), plot_view);
            if (out.empty()) std::cout << csv;
            else write_file(out, csv);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
