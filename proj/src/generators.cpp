#include "qmr/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "qmr/errors.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/metric_core.hpp"
#include "qmr/rng.hpp"

namespace qmr {

namespace {

using nlohmann::json;

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0, 1]");
}

FiniteMetricSpace chordal_power(std::vector<std::vector<double>> pts, double eps, std::string label) {
    const std::size_t n = pts.size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < pts[i].size(); ++c) {
                const double t = pts[i][c] - pts[j][c];
                s += t * t;
            }
            dist[i * n + j] = dist[j * n + i] = std::pow(std::sqrt(s), eps);
        }
    return FiniteMetricSpace(n, std::move(dist), std::move(label), Validation::automatic, std::move(pts));
}

// Parameter access with the field name in every error.
double number(const json& p, const std::string& key) {
    if (!p.contains(key)) throw ValidationError("missing field '" + key + "'");
    if (!p[key].is_number()) throw ValidationError("field '" + key + "' must be a number");
    return p[key].get<double>();
}

double number_or(const json& p, const std::string& key, double fallback) {
    return p.contains(key) ? number(p, key) : fallback;
}

std::size_t count(const json& p, const std::string& key, std::size_t lo = 1) {
    const double v = number(p, key);
    if (!(v >= static_cast<double>(lo)) || v != std::floor(v) || v > 1e8)
        throw ValidationError("field '" + key + "' must be an integer >= " + std::to_string(lo));
    return static_cast<std::size_t>(v);
}

std::size_t count_or(const json& p, const std::string& key, std::size_t fallback, std::size_t lo = 1) {
    return p.contains(key) ? count(p, key, lo) : fallback;
}

std::uint64_t seed_of(const json& p) {
    if (!p.contains("seed")) throw ValidationError("missing field 'seed'");
    if (!p["seed"].is_number_unsigned() && !p["seed"].is_number_integer())
        throw ValidationError("field 'seed' must be a nonnegative integer");
    return p["seed"].get<std::uint64_t>();
}

double eps_of(const json& p) {
    const double eps = number_or(p, "eps", 1.0);
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("field 'eps' must lie in (0, 1]");
    return eps;
}

GroupActionModel checked_model(const std::string& text) {
    try {
        return model_from_spec(text);
    } catch (const Error& e) {
        throw ValidationError(std::string("field 'group': ") + e.what());
    }
}

}  // namespace

FiniteMetricSpace circle_snowflake(std::size_t n, double eps) {
    check_eps(eps);
    if (n < 2) throw ValidationError("circle_snowflake needs at least 2 points");
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        pts.push_back({std::cos(t), std::sin(t)});
    }
    return chordal_power(std::move(pts), eps, "circle_snowflake");
}

FiniteMetricSpace sphere_snowflake(std::size_t n, double eps, std::uint64_t seed, int dim) {
    check_eps(eps);
    if (n < 2) throw ValidationError("sphere_snowflake needs at least 2 points");
    if (dim < 1 || dim > 8) throw ValidationError("sphere dimension must lie in [1, 8]");
    Rng rng(seed);
    std::vector<std::vector<double>> pts;
    while (pts.size() < n) {
        std::vector<double> v(dim + 1);
        double s = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            s += x * x;
        }
        if (s < 1e-12) continue;
        for (auto& x : v) x /= std::sqrt(s);
        pts.push_back(std::move(v));
    }
    return chordal_power(std::move(pts), eps, "sphere_snowflake");
}

FiniteMetricSpace koch_curve(int level) {
    if (level < 0 || level > 7) throw ValidationError("koch level must lie in [0, 7]");
    std::vector<cplx> pts{cplx(0.0), cplx(1.0)};
    const cplx turn = std::polar(1.0, std::numbers::pi / 3.0);
    for (int l = 0; l < level; ++l) {
        std::vector<cplx> next{pts.front()};
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const cplx a = pts[i], b = pts[i + 1], step = (b - a) / 3.0;
            next.push_back(a + step);
            next.push_back(a + step + step * turn);
            next.push_back(a + 2.0 * step);
            next.push_back(b);
        }
        pts = std::move(next);
    }
    std::vector<std::vector<double>> coords;
    for (const auto& z : pts) coords.push_back({z.real(), z.imag()});
    return FiniteMetricSpace::euclidean(std::move(coords), "koch_curve");
}

FiniteMetricSpace euclidean_cloud(std::size_t n, int dim, std::uint64_t seed) {
    if (n < 1) throw ValidationError("euclidean_cloud needs at least 1 point");
    if (dim < 1 || dim > 16) throw ValidationError("dimension must lie in [1, 16]");
    Rng rng(seed);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
        for (auto& x : p) x = rng.uniform();
    return FiniteMetricSpace::euclidean(std::move(pts), "euclidean_cloud");
}

FiniteMetricSpace tree_metric(std::size_t nodes, std::uint64_t seed, int max_weight) {
    if (nodes < 1) throw ValidationError("tree needs at least 1 node");
    if (max_weight < 1) throw ValidationError("max_weight must be at least 1");
    Rng rng(seed);
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes);
    for (std::size_t i = 1; i < nodes; ++i) {
        const std::size_t parent = rng.index(i);
        const double w = 1.0 + static_cast<double>(rng.index(static_cast<std::uint64_t>(max_weight)));
        adj[i].emplace_back(parent, w);
        adj[parent].emplace_back(i, w);
    }
    std::vector<double> dist(nodes * nodes, 0.0);
    for (std::size_t s = 0; s < nodes; ++s) {
        // Integer weights: sums are exact in double.
        std::vector<char> seen(nodes, 0);
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    dist[s * nodes + v] = dist[s * nodes + u] + w;
                    stack.push_back(v);
                }
        }
    }
    return FiniteMetricSpace(nodes, std::move(dist), "tree_metric");
}

std::vector<cplx> disk_cloud_points(std::size_t n, double R, std::uint64_t seed) {
    if (!(R > 0.0 && R < 30.0)) throw ValidationError("disk radius R must lie in (0, 30)");
    Rng rng(seed);
    std::vector<cplx> out;
    // Hyperbolic area inside radius s is 2 pi (cosh s - 1).
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double s = std::acosh(1.0 + u * (std::cosh(R) - 1.0));
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        out.push_back(std::polar(std::tanh(s / 2.0), t));
    }
    return out;
}

FiniteMetricSpace disk_cloud(std::size_t n, double R, std::uint64_t seed) {
    return disk_space(disk_cloud_points(n, R, seed), "disk_cloud");
}

BoundarySample tree_boundary(int branching, int depth) {
    if (branching < 2) throw ValidationError("branching must be at least 2");
    if (depth < 1) throw ValidationError("depth must be at least 1");
    const double leaves = std::pow(static_cast<double>(branching), depth);
    if (leaves > 4096) throw ValidationError("tree boundary would exceed 4096 ends");
    const std::size_t n = static_cast<std::size_t>(leaves);
    BoundarySample s;
    s.source = "analytic";
    s.gromov.n = n;
    s.gromov.products.assign(n * n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        std::string label;
        for (std::size_t x = i, l = 0; l < static_cast<std::size_t>(depth); ++l, x /= branching)
            label.insert(label.begin(), static_cast<char>('0' + x % branching));
        s.labels.push_back(label);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::size_t k = 0;
            while (k < s.labels[i].size() && s.labels[i][k] == s.labels[j][k]) ++k;
            s.gromov.at(i, j) = static_cast<double>(k);
        }
    return s;
}

std::vector<std::string> generator_kinds() {
    return {"circle_snowflake", "sphere_snowflake", "koch_curve", "euclidean_cloud", "tree_metric",
            "disk_cloud",       "tree_boundary",    "schottky",   "psl2z",           "cyclic",
            "genus2",           "picard",           "loxodromic", "group"};
}

GeneratorSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("generator spec must be a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError("missing field 'kind'");
    GeneratorSpec spec;
    spec.kind = j["kind"].get<std::string>();
    spec.params = j;
    spec.params.erase("kind");
    return spec;
}

Generated generate(const GeneratorSpec& spec) {
    const json& p = spec.params;
    const std::string& k = spec.kind;
    if (k == "circle_snowflake") return circle_snowflake(count(p, "n", 2), eps_of(p));
    if (k == "sphere_snowflake")
        return sphere_snowflake(count(p, "n", 2), eps_of(p), seed_of(p),
                                static_cast<int>(count_or(p, "dim", 2)));
    if (k == "koch_curve") return koch_curve(static_cast<int>(count_or(p, "level", 0, 0)));
    if (k == "euclidean_cloud")
        return euclidean_cloud(count(p, "n"), static_cast<int>(count_or(p, "dim", 2)), seed_of(p));
    if (k == "tree_metric")
        return tree_metric(count(p, "n"), seed_of(p), static_cast<int>(count_or(p, "max_weight", 5)));
    if (k == "disk_cloud") return disk_cloud(count(p, "n"), number_or(p, "R", 4.0), seed_of(p));
    if (k == "tree_boundary")
        return tree_boundary(static_cast<int>(count_or(p, "branching", 2, 2)), static_cast<int>(count(p, "depth")));
    if (k == "psl2z") return psl2z_model();
    if (k == "genus2") return genus2_model();
    if (k == "picard") return picard_model();
    if (k == "cyclic") {
        const double ell = number(p, "ell");
        if (!(ell > 0.0)) throw ValidationError("field 'ell' must be positive");
        return cyclic_model(ell);
    }
    if (k == "loxodromic") {
        const double ell = number(p, "ell");
        if (!(ell > 0.0)) throw ValidationError("field 'ell' must be positive");
        return loxodromic_model(ell, number_or(p, "twist", 0.0));
    }
    if (k == "schottky") {
        if (p.contains("circles")) {
            // [[[x1, r1], [x2, r2]], ...]: real-centred circles in the upper half-plane.
            const json& c = p["circles"];
            if (!c.is_array() || c.empty()) throw ValidationError("field 'circles' must be a nonempty array");
            std::vector<std::pair<Circle, Circle>> pairs;
            for (const auto& pair : c) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_array() || pair[0].size() != 2 ||
                    !pair[1].is_array() || pair[1].size() != 2)
                    throw ValidationError("field 'circles' entries must be [[x1, r1], [x2, r2]]");
                pairs.push_back({Circle{cplx(pair[0][0].get<double>()), pair[0][1].get<double>()},
                                 Circle{cplx(pair[1][0].get<double>()), pair[1][1].get<double>()}});
            }
            try {
                return schottky_from_circles(pairs);
            } catch (const ConfigError& e) {
                throw ValidationError(std::string("field 'circles': ") + e.what());
            }
        }
        const double s = number(p, "s");
        if (!(s > 0.0 && s < 1.0)) throw ValidationError("field 's' must lie in (0, 1)");
        return schottky_model(s);
    }
    if (k == "group") {
        if (!p.contains("group") || !p["group"].is_string()) throw ValidationError("missing field 'group'");
        return checked_model(p["group"].get<std::string>());
    }
    std::string known;
    for (const auto& name : generator_kinds()) known += (known.empty() ? "" : ", ") + name;
    throw ValidationError("unknown generator kind '" + k + "' (known: " + known + ")");
}

}  // namespace qmr
