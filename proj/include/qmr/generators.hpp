#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qmr/hyperbolic.hpp"
#include "qmr/metric_space.hpp"
#include "qmr/mobius.hpp"

namespace qmr {

/// N equispaced points on S^1 with the metric chordal^eps.
FiniteMetricSpace circle_snowflake(std::size_t n, double eps);

/// Seeded uniform points on S^dim with the metric chordal^eps.
FiniteMetricSpace sphere_snowflake(std::size_t n, double eps, std::uint64_t seed, int dim = 2);

/// Vertices of the level-`level` Koch polyline from (0,0) to (1,0), in arc
/// length order, with the Euclidean metric of the plane.
FiniteMetricSpace koch_curve(int level);

/// Seeded uniform cloud in [0,1]^dim.
FiniteMetricSpace euclidean_cloud(std::size_t n, int dim, std::uint64_t seed);

/// Random recursive tree (node i attaches to a uniform earlier node) with
/// integer edge weights in [1, max_weight]; path metric.
FiniteMetricSpace tree_metric(std::size_t nodes, std::uint64_t seed, int max_weight = 5);

/// Seeded points of H^2 (disk model) uniform for hyperbolic area inside the
/// ball of radius R about 0, with exact hyperbolic distances.
FiniteMetricSpace disk_cloud(std::size_t n, double R, std::uint64_t seed);
std::vector<cplx> disk_cloud_points(std::size_t n, double R, std::uint64_t seed);

/// Ends of the rooted tree with `branching` children per vertex, truncated at
/// `depth`: Gromov product of two ends = depth of their last common vertex.
BoundarySample tree_boundary(int branching, int depth);

/// Kind plus parameters, as read from a JSON object {"kind": ..., ...}.
struct GeneratorSpec {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
};

using Generated = std::variant<FiniteMetricSpace, GroupActionModel, BoundarySample>;

/// Known kinds: circle_snowflake, sphere_snowflake, koch_curve,
/// euclidean_cloud, tree_metric, disk_cloud, tree_boundary, schottky, psl2z,
/// cyclic, genus2, picard, loxodromic, group. Throws ValidationError naming
/// the offending field.
Generated generate(const GeneratorSpec& spec);

GeneratorSpec spec_from_json(const nlohmann::json& j);

std::vector<std::string> generator_kinds();

}  // namespace qmr
