#include "qmr/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qmr/chain_metric.hpp"
#include "qmr/cube_inequality.hpp"
#include "qmr/elevator.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/hyperbolic.hpp"
#include "qmr/metric_core.hpp"
#include "qmr/serialize.hpp"
#include "qmr/sphere_geometry.hpp"

namespace qmr {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

// Check bodies return a detail string and set `ok`.
using Body = std::function<std::string(bool& ok)>;

void run(InvariantSuite& suite, const std::string& name, const Body& body) {
    InvariantCheck c;
    c.name = name;
    try {
        bool ok = false;
        c.detail = body(ok);
        c.passed = ok;
    } catch (const std::exception& e) {
        c.passed = false;
        c.detail = std::string("exception: ") + e.what();
    }
    suite.checks.push_back(std::move(c));
}

Vec unit_circle_point(double t) { return {std::cos(t), std::sin(t)}; }

void metric_core_suite(InvariantSuite& s, std::uint64_t seed) {
    const auto X = sphere_snowflake(60, 0.7, seed);
    const auto quads = sample_quadruples(X.size(), 5000, Rng::derive(seed, 1));
    run(s, "cross-ratio swap of the first two points inverts it", [&](bool& ok) {
        double worst = 0.0;
        for (const auto& q : quads)
            worst = std::max(worst, std::abs(cross_ratio(X, q) * cross_ratio(X, q.swap_first_two()) - 1.0));
        ok = worst <= 1e-12;
        return "max |cr * cr' - 1| = " + fmt(worst);
    });
    run(s, "cross-ratio invariant under the pair swap (13)(24)", [&](bool& ok) {
        double worst = 0.0;
        for (const auto& q : quads) {
            const Quadruple p(q[2], q[3], q[0], q[1]);
            worst = std::max(worst, std::abs(cross_ratio(X, q) / cross_ratio(X, p) - 1.0));
        }
        ok = worst <= 1e-12;
        return "max relative gap " + fmt(worst);
    });
    run(s, "snowflake exponents compose", [&](bool& ok) {
        const auto a = snowflake(snowflake(X, 0.5), 0.6);
        const auto b = snowflake(X, 0.3);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.matrix().size(); ++i)
            worst = std::max(worst, std::abs(a.matrix()[i] - b.matrix()[i]));
        ok = worst <= 1e-12;
        return "max entry gap " + fmt(worst);
    });
    run(s, "identity map has cross-ratio distortion 1", [&](bool& ok) {
        std::vector<Index> id(X.size());
        for (Index i = 0; i < id.size(); ++i) id[i] = i;
        const auto r = qm_distortion(X, X, id, 20000, seed);
        ok = std::abs(r.linear_constant_C - 1.0) <= 1e-12;
        return "C = " + fmt(r.linear_constant_C);
    });
    run(s, "greedy nets are separated and maximal", [&](bool& ok) {
        ok = true;
        std::string out;
        for (double sep : {0.05, 0.2, 0.6}) {
            const auto net = max_separated_net(X, sep, seed);
            ok = ok && verify_net(X, net);
            out += fmt(sep) + ":" + std::to_string(net.members.size()) + " ";
        }
        return "net sizes " + out;
    });
    run(s, "nets and quadruple samples are deterministic per seed", [&](bool& ok) {
        const auto a = max_separated_net(X, 0.1, seed), b = max_separated_net(X, 0.1, seed);
        const auto qa = sample_quadruples(X.size(), 300, seed), qb = sample_quadruples(X.size(), 300, seed);
        ok = a.members == b.members && qa == qb;
        return ok ? "identical" : "differs";
    });
    run(s, "Ahlfors fit of the circle has slope near 1", [&](bool& ok) {
        const auto C = circle_snowflake(1024, 1.0);
        const auto fit = ahlfors_fit(C, 1.0, {0.4, 0.2, 0.1, 0.05, 0.025}, seed, 0.1);
        ok = fit.consistent;
        return "slope " + fmt(fit.fitted_slope);
    });
}

void chain_metric_suite(InvariantSuite& s, std::uint64_t seed) {
    const auto X = circle_snowflake(512, 0.5);
    const double eps = 0.5;
    const int kmax = resolved_kmax(X.normalized().mesh(), eps);
    run(s, "k-ball covers are maximal nets whose balls cover", [&](bool& ok) {
        ok = true;
        for (int k = 0; k <= kmax; ++k) ok = ok && verify_cover(build_cover(X, eps, k, seed));
        return "k = 0.." + std::to_string(kmax);
    });
    run(s, "nerve is symmetric and loop-free", [&](bool& ok) {
        ok = true;
        for (int k = 1; k <= kmax; ++k) {
            const auto nerve = build_nerve(std::make_shared<const KBallCover>(build_cover(X, eps, k, seed)));
            for (std::size_t a = 0; a < nerve.adjacency.size(); ++a)
                for (auto b : nerve.adjacency[a]) {
                    const auto& back = nerve.adjacency[b];
                    ok = ok && b != a && std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(a));
                }
        }
        return ok ? "ok" : "asymmetric or looped adjacency";
    });
    run(s, "chain lengths satisfy the triangle inequality", [&](bool& ok) {
        Rng rng(Rng::derive(seed, 2));
        ok = true;
        std::size_t tested = 0;
        for (int k = 1; k <= kmax; ++k) {
            const auto nerve = build_nerve(std::make_shared<const KBallCover>(build_cover(X, eps, k, seed)));
            std::vector<std::pair<Index, Index>> pairs;
            for (int t = 0; t < 200; ++t) {
                const Index x = rng.index(X.size()), y = rng.index(X.size()), z = rng.index(X.size());
                pairs.insert(pairs.end(), {{x, z}, {x, y}, {y, z}});
            }
            const auto tab = chain_distance(nerve, pairs);
            for (std::size_t t = 0; t < pairs.size(); t += 3) {
                const auto &xz = tab.lengths[t], &xy = tab.lengths[t + 1], &yz = tab.lengths[t + 2];
                if (!xy || !yz) continue;
                ++tested;
                ok = ok && xz && *xz <= *xy + *yz;
            }
        }
        return std::to_string(tested) + " triples";
    });
    run(s, "chain lengths dominate discrete path lengths", [&](bool& ok) {
        const auto r = desnowflake(X, eps, 0, kmax, 60, seed);
        ok = r.path_lower_bound_holds;
        return "window " + std::to_string(r.kmin) + ".." + std::to_string(r.kmax);
    });
    run(s, "de-snowflake reports are deterministic per seed", [&](bool& ok) {
        const auto a = dump(to_json(desnowflake(X, eps, 0, kmax, 40, seed)));
        const auto b = dump(to_json(desnowflake(X, eps, 0, kmax, 40, seed)));
        ok = a == b;
        return "hash " + hex64(fnv1a64(a));
    });
}

void cube_suite(InvariantSuite& s, std::uint64_t seed) {
    run(s, "grid covers achieve equality", [&](bool& ok) {
        ok = true;
        for (int n : {1, 2, 3})
            for (int m = 1; m <= (n == 3 ? 4 : 8); ++m) {
                const auto r = check_length_volume(grid_cover(n, m));
                ok = ok && r.holds && static_cast<double>(r.N) == r.product;
            }
        return "n = 1..3";
    });
    run(s, "slab and single-set covers", [&](bool& ok) {
        const auto a = check_length_volume(slab_cover(2));
        const auto b = check_length_volume(single_set_cover(3));
        ok = a.holds && a.N == 2 && a.d == std::vector<std::size_t>{2, 1} && b.holds && b.N == 1;
        return "slab d = (" + std::to_string(a.d[0]) + "," + std::to_string(a.d[1]) + ")";
    });
    run(s, "random covers cover and satisfy N >= prod d", [&](bool& ok) {
        const auto f2 = fuzz_length_volume(2, 40, 120, seed);
        const auto f3 = fuzz_length_volume(3, 10, 200, Rng::derive(seed, 3));
        ok = f2.violations == 0 && f3.violations == 0;
        return "violations " + std::to_string(f2.violations + f3.violations);
    });
    run(s, "chain-count map claims", [&](bool& ok) {
        ok = true;
        for (int t = 0; t < 10; ++t) {
            const auto c = random_box_cover(2, 80, Rng::derive(seed, 100 + t));
            const auto m = chain_count_map(c);
            ok = ok && covers_cube(c) && m.face_claim_holds && m.far_face_claim_holds;
        }
        return "10 covers";
    });
    run(s, "stereographic projection round-trips", [&](bool& ok) {
        Rng rng(seed);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            Vec y{rng.normal(), rng.normal(), rng.normal()};
            const Vec back = stereographic(inverse_stereographic(y));
            for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(back[c] - y[c]) / (1.0 + norm(y)));
        }
        ok = worst <= 1e-12;
        return "max error " + fmt(worst);
    });
    run(s, "cube in the sphere stays in its balls and off the cap", [&](bool& ok) {
        const auto c = cube_in_sphere(antipodal_config(2, 0.2), seed);
        ok = c.faces_inside && c.avoids_cap && c.avoids_E;
        return "min opposite distance " + fmt(c.min_opposite_distance);
    });
}

void hyperbolic_suite(InvariantSuite& s, std::uint64_t seed) {
    const auto D = disk_cloud(120, 4.0, seed);
    const auto G = gromov_products(D, 0);
    run(s, "Gromov products lie in [0, min(d(x,p), d(y,p))]", [&](bool& ok) {
        ok = true;
        for (Index i = 0; i < D.size(); ++i)
            for (Index j = 0; j < D.size(); ++j) {
                const double g = G(i, j);
                ok = ok && g >= -1e-12 && g <= std::min(D(i, 0), D(j, 0)) + 1e-12;
            }
        return "n = " + std::to_string(D.size());
    });
    run(s, "tree metrics are 0-hyperbolic", [&](bool& ok) {
        ok = true;
        for (int t = 0; t < 3; ++t) {
            const auto T = tree_metric(80, Rng::derive(seed, t));
            ok = ok && four_point_delta(gromov_products(T, 0)).delta == 0.0;
        }
        return "3 trees";
    });
    run(s, "H^2 samples are log 2-hyperbolic", [&](bool& ok) {
        const double d = four_point_delta(G).delta;
        ok = d <= std::log(2.0) + 1e-9;
        return "delta " + fmt(d);
    });
    run(s, "ultrametric boundary: chain metric equals rho", [&](bool& ok) {
        const auto r = visual_metric(tree_boundary(3, 4), 0.7);
        ok = r.applicable && r.min_ratio == 1.0 && r.max_ratio == 1.0;
        return "K = " + fmt(r.K);
    });
    run(s, "visual chain metric never exceeds rho", [&](bool& ok) {
        const auto m = schottky_model(0.9);
        const auto ls = limit_set_sample(m, 4, seed);
        std::vector<Vec> pts(ls.points.begin(), ls.points.begin() + std::min<std::size_t>(ls.points.size(), 150));
        const auto b = analytic_boundary_sample(m, pts);
        ok = true;
        for (double eps : {0.5, 1.0}) ok = ok && visual_metric(b, eps).upper_holds;
        return std::to_string(pts.size()) + " points";
    });
    run(s, "delta computation is deterministic", [&](bool& ok) {
        const auto a = four_point_delta(G, seed), b = four_point_delta(G, seed);
        ok = a.delta == b.delta && a.worst == b.worst;
        return "delta " + fmt(a.delta);
    });
}

void group_suite(InvariantSuite& s, std::uint64_t seed) {
    const std::vector<std::string> presets{"psl2z", "cyclic:1", "schottky:0.9", "genus2", "picard", "loxodromic:1,0.5"};
    run(s, "preset generators have determinant 1 and listed inverses", [&](bool& ok) {
        ok = true;
        double worst = 0.0;
        for (const auto& p : presets) {
            auto m = model_from_spec(p);
            validate_model(m);
            for (std::size_t i = 0; i < m.generators.size(); ++i) {
                worst = std::max(worst, std::abs(m.generators[i].det() - 1.0));
                ok = ok && (m.generators[i] * m.generators[m.inverse_of[i]]).is_identity();
            }
        }
        ok = ok && worst <= 1e-12;
        return "max |det - 1| = " + fmt(worst);
    });
    run(s, "cyclic orbit counts are 2 floor(R/l) + 1", [&](bool& ok) {
        const auto o = orbit_ball(cyclic_model(0.7), 9.0);
        ok = true;
        for (double r = 0.35; r <= 9.0; r += 0.7)
            ok = ok && o.count(r) == 2 * static_cast<std::size_t>(std::floor(r / 0.7)) + 1;
        return std::to_string(o.points.size()) + " points";
    });
    run(s, "orbit distances are sorted and within R", [&](bool& ok) {
        const auto o = orbit_ball(genus2_model(), 6.0);
        ok = !o.truncated && std::is_sorted(o.points.begin(), o.points.end(),
                                            [](const auto& a, const auto& b) { return a.distance < b.distance; });
        ok = ok && (o.points.empty() || o.points.back().distance <= 6.0);
        return std::to_string(o.points.size()) + " points";
    });
    run(s, "boundary action preserves cross-ratios", [&](bool& ok) {
        const auto m = genus2_model();
        Rng rng(seed);
        std::vector<Vec> pts;
        for (int i = 0; i < 24; ++i) pts.push_back(unit_circle_point(rng.uniform(0.0, 2.0 * std::numbers::pi)));
        double worst = 0.0;
        for (int w = 0; w < 5; ++w) {
            const Mobius g = random_word(m, 1 + rng.index(6), rng);
            worst = std::max(worst, boundary_action(m, g, pts, 3000, Rng::derive(seed, w)).max_deviation);
        }
        ok = worst <= 1e-9;
        return "max deviation " + fmt(worst);
    });
    run(s, "limit set points lie on the circle", [&](bool& ok) {
        const auto ls = limit_set_sample(schottky_model(0.7), 5, seed);
        double worst = 0.0;
        for (const auto& p : ls.points) worst = std::max(worst, std::abs(norm(p) - 1.0));
        ok = worst <= 1e-12 && !ls.points.empty();
        return std::to_string(ls.points.size()) + " points";
    });
    run(s, "triple separation finds a separating element", [&](bool& ok) {
        const std::array<Vec, 3> t{unit_circle_point(0.0), unit_circle_point(0.01), unit_circle_point(0.02)};
        const auto r = separate_triple(genus2_model(), t, 3);
        ok = r.achieved > r.input_min;
        return "separation " + fmt(r.input_min) + " -> " + fmt(r.achieved);
    });
    run(s, "elevator at unit scale has constants near 1", [&](bool& ok) {
        const Vec p = unit_circle_point(0.3);
        const auto sample = elevator_sample(p, 2.0, 2.0, 200, seed);
        const auto c = conformal_elevator(genus2_model(), sample, 0, 2.0, 2.0, 1);
        ok = c.C_i <= 2.5 && c.C_ii <= 2.5 && c.c_iii > 0.2;
        return "C_i " + fmt(c.C_i) + ", C_ii " + fmt(c.C_ii) + ", c_iii " + fmt(c.c_iii);
    });
}

void cli_io_suite(InvariantSuite& s, std::uint64_t seed) {
    run(s, "generators are hash-stable per seed", [&](bool& ok) {
        const GeneratorSpec spec{"sphere_snowflake", {{"n", 50}, {"eps", 0.6}, {"seed", seed}}};
        const auto a = dump(space_to_json(std::get<FiniteMetricSpace>(generate(spec))));
        const auto b = dump(space_to_json(std::get<FiniteMetricSpace>(generate(spec))));
        ok = a == b;
        return "hash " + hex64(fnv1a64(a));
    });
    run(s, "level-1 Koch polyline", [&](bool& ok) {
        const auto K = koch_curve(1);
        double length = 0.0;
        for (Index i = 0; i + 1 < K.size(); ++i) length += K(i, i + 1);
        ok = K.size() == 5 && std::abs(K(0, 4) - 1.0) <= 1e-15 && std::abs(length - 4.0 / 3.0) <= 1e-14;
        return "length " + fmt(length);
    });
    run(s, "CSV and JSON round-trips are exact", [&](bool& ok) {
        const auto X = euclidean_cloud(30, 3, seed);
        const auto a = space_from_csv(space_to_csv(X));
        const auto b = space_from_json(json::parse(dump(space_to_json(X))));
        ok = a.matrix() == X.matrix() && b.matrix() == X.matrix();
        return "n = 30";
    });
    run(s, "two-circle Schottky spec validates", [&](bool& ok) {
        const GeneratorSpec spec{"schottky", {{"circles", json::array({json::array({{-0.6, 0.3}, {0.6, 0.3}})})}}};
        const auto m = std::get<GroupActionModel>(generate(spec));
        ok = m.generators.size() == 2;
        return std::to_string(m.generators.size()) + " generators";
    });
    run(s, "bad parameters name the field", [&](bool& ok) {
        try {
            generate(GeneratorSpec{"circle_snowflake", {{"n", 10}, {"eps", 1.5}}});
            ok = false;
            return std::string("accepted eps = 1.5");
        } catch (const ValidationError& e) {
            ok = std::string(e.what()).find("eps") != std::string::npos;
            return std::string(e.what());
        }
    });
    run(s, "unknown plot view lists the available ones", [&](bool& ok) {
        try {
            emit_plot_data(envelope("entropy"), "nope");
            ok = false;
            return std::string("accepted");
        } catch (const ParameterError& e) {
            ok = std::string(e.what()).find("entropy") != std::string::npos;
            return std::string(e.what());
        }
    });
}

}  // namespace

bool InvariantSuite::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

nlohmann::json InvariantSuite::to_json() const {
    nlohmann::json j = envelope("invariants", {{"module", module}, {"seed", seed}});
    j["module"] = module;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return j;
}

std::vector<std::string> invariant_modules() {
    return {"metric_core", "chain_metric", "cube_inequality", "hyperbolic_core", "group_actions", "cli_io"};
}

InvariantSuite run_invariants(const std::string& module, std::uint64_t seed) {
    InvariantSuite s;
    s.module = module;
    s.seed = seed;
    if (module == "metric_core")
        metric_core_suite(s, seed);
    else if (module == "chain_metric")
        chain_metric_suite(s, seed);
    else if (module == "cube_inequality")
        cube_suite(s, seed);
    else if (module == "hyperbolic_core")
        hyperbolic_suite(s, seed);
    else if (module == "group_actions")
        group_suite(s, seed);
    else if (module == "cli_io")
        cli_io_suite(s, seed);
    else
        throw ParameterError("unknown invariant module '" + module + "'");
    return s;
}

}  // namespace qmr
