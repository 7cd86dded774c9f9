#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "qmr/campaign.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/serialize.hpp"

using namespace qmr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("qmr_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QMR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("generators") {
    SUBCASE("genus 2 octagon has four generators and their inverses") {
        const auto m = std::get<GroupActionModel>(generate(spec_from_json({{"kind", "genus2"}})));
        CHECK(m.generators.size() == 8);
        for (std::size_t i = 0; i < m.generators.size(); ++i) CHECK(m.inverse_of[m.inverse_of[i]] == i);
    }
    SUBCASE("Koch level 1") {
        const auto K = std::get<FiniteMetricSpace>(generate(spec_from_json({{"kind", "koch_curve"}, {"level", 1}})));
        REQUIRE(K.size() == 5);
        CHECK(K(0, 4) == doctest::Approx(1.0));
        double len = 0;
        for (Index i = 0; i + 1 < 5; ++i) len += K(i, i + 1);
        CHECK(len == doctest::Approx(4.0 / 3.0));
    }
    SUBCASE("Schottky from two circle pairs") {
        const json spec = {{"kind", "schottky"}, {"circles", {{{-3.0, 1.0}, {3.0, 1.0}}, {{-0.5, 0.2}, {0.5, 0.2}}}}};
        const auto m = std::get<GroupActionModel>(generate(spec_from_json(spec)));
        CHECK(m.generators.size() == 4);
    }
    SUBCASE("bad parameters name the field") {
        try {
            generate(spec_from_json({{"kind", "circle_snowflake"}, {"n", 10}, {"eps", 1.5}}));
            FAIL("expected a ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("eps") != std::string::npos);
        }
        CHECK_THROWS_AS(generate(spec_from_json({{"kind", "nope"}})), ValidationError);
        CHECK_THROWS_AS(spec_from_json(json::array()), ValidationError);
    }
}

TEST_CASE("round trips") {
    const auto X = euclidean_cloud(20, 2, 9);
    SUBCASE("space CSV") {
        const auto Y = space_from_csv(space_to_csv(X));
        REQUIRE(Y.size() == X.size());
        for (Index i = 0; i < X.size(); ++i)
            for (Index j = 0; j < X.size(); ++j) CHECK(Y(i, j) == X(i, j));
    }
    SUBCASE("space JSON") {
        const auto Y = space_from_json(space_to_json(X));
        CHECK(Y.matrix() == X.matrix());
        CHECK(dump(space_to_json(X)) == dump(space_to_json(Y)));
    }
    SUBCASE("boundary JSON and CSV") {
        const auto b = tree_boundary(2, 3);
        const auto j = boundary_from_json(boundary_to_json(b));
        const auto c = boundary_from_csv(boundary_to_csv(b));
        REQUIRE(j.size() == b.size());
        REQUIRE(c.size() == b.size());
        for (std::size_t i = 0; i < b.gromov.products.size(); ++i) {
            CHECK(j.gromov.products[i] == b.gromov.products[i]);
            CHECK(c.gromov.products[i] == b.gromov.products[i]);
        }
    }
    SUBCASE("orbit JSON") {
        const auto o = orbit_ball(cyclic_model(1.0), 5.0);
        const auto p = orbit_from_json(orbit_to_json(o));
        CHECK(p.points.size() == o.points.size());
        CHECK(p.count(3.0) == o.count(3.0));
    }
    SUBCASE("hashes are stable") {
        CHECK(fnv1a64("abc") == fnv1a64("abc"));
        CHECK(fnv1a64("abc") != fnv1a64("abd"));
        CHECK(hex64(0).size() == 16);
    }
    SUBCASE("schema is checked") {
        json j = space_to_json(X);
        j["schema"] = 999;
        CHECK_THROWS(check_schema(j));
    }
}

TEST_CASE("campaigns") {
    SUBCASE("empty pipeline writes only a manifest") {
        const auto dir = scratch("empty");
        const auto r = run_campaign({{"schema", 1}, {"seed", 1}, {"pipeline", json::array()}}, dir.string());
        CHECK(r.exit_code == 0);
        CHECK(fs::exists(dir / "manifest.json"));
        CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
    }
    const json cfg = {{"schema", 1},
                      {"seed", 7},
                      {"pipeline",
                       {{{"name", "tree"}, {"op", "generate"}, {"params", {{"kind", "tree_metric"}, {"n", 30}}}},
                        {{"name", "delta"}, {"op", "four_point_delta"}, {"params", {{"generator", {{"kind", "tree_metric"}, {"n", 30}}}, {"max_delta", 0.0}}},
                         {"depends_on", {"tree"}}}}}};
    SUBCASE("reruns are byte-identical apart from wall times") {
        const auto a = scratch("rerun_a"), b = scratch("rerun_b");
        const auto ra = run_campaign(cfg, a.string()), rb = run_campaign(cfg, b.string());
        CHECK(ra.exit_code == rb.exit_code);
        for (const char* f : {"tree.json", "delta.json"}) CHECK(read_file((a / f).string()) == read_file((b / f).string()));
        for (std::size_t i = 0; i < ra.manifest["stages"].size(); ++i)
            CHECK(ra.manifest["stages"][i]["hash"] == rb.manifest["stages"][i]["hash"]);
    }
    SUBCASE("a failing stage skips its dependents only") {
        json bad = cfg;
        bad["pipeline"][0]["params"]["n"] = -3;
        bad["pipeline"].push_back({{"name", "other"}, {"op", "generate"}, {"params", {{"kind", "tree_metric"}, {"n", 10}}}});
        const auto r = run_campaign(bad, scratch("fail").string());
        CHECK(r.exit_code != 0);
        const auto& st = r.manifest["stages"];
        CHECK(st[0]["status"] == "failed");
        CHECK(st[1]["status"] == "skipped");
        CHECK(st[2]["status"] == "ok");
    }
    SUBCASE("validation") {
        json c = cfg;
        c.erase("seed");
        CHECK_THROWS_AS(validate_campaign(c), ConfigError);
        c = cfg;
        c["pipeline"][1]["op"] = "bogus";
        CHECK_THROWS_AS(validate_campaign(c), ConfigError);
        c = cfg;
        c["pipeline"][1]["name"] = "tree";
        CHECK_THROWS_AS(validate_campaign(c), ConfigError);
        c = cfg;
        c["pipeline"][1]["depends_on"] = {"later"};
        CHECK_THROWS_AS(validate_campaign(c), ConfigError);
        c = cfg;
        c["pipeline"][0]["name"] = "../escape";
        CHECK_THROWS_AS(validate_campaign(c), ConfigError);
    }
}

TEST_CASE("plot data") {
    const auto e = entropy(orbit_ball(psl2z_model(), 8.0), 4.0, 8.0);
    json report = to_json(e);
    const auto csv = emit_plot_data(report, "entropy");
    CHECK(csv.rfind("R,log_N\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(e.radii.size()) + 1);
    CHECK_THROWS(emit_plot_data(report, "no_such_view"));
    CHECK_THROWS(emit_plot_data(report, "desnowflake"));  // wrong report kind
    CHECK(!plot_views().empty());
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    const std::string out = (dir / "c.json").string();
    CHECK(run_cli("gen --kind circle_snowflake --param n=512 --param eps=0.5 --seed 1 --out " + out) == 0);
    CHECK(fs::exists(out));
    CHECK(run_cli("desnowflake --input " + out + " --eps 0.5 --seed 3") == 0);
    CHECK(run_cli("desnowflake --input " + out + " --eps 0.5") == 2);  // --seed is required
    CHECK(run_cli("gen --kind nope --seed 1") == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("orbit --group psl2z --R 6") == 0);
    CHECK(run_cli("entropy --group cyclic:1 --R 40 --window 20:40 --expect 1 --tol 0.15") == 1);
}
