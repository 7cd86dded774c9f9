#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmr/metric_core.hpp"
#include "qmr/metric_space.hpp"

namespace qmr {

/// The k-balls of a space: a maximal e^{-eps k}-separated net and the balls
/// of radius inflation * e^{-eps k} around its members.
///
/// The parent is stored normalized to diameter 1; `normalization` is the
/// original diameter.
struct KBallCover {
    std::shared_ptr<const FiniteMetricSpace> parent;
    double normalization = 1.0;
    double eps = 1.0;
    int k = 0;
    Net net;
    double ball_radius = 0.0;
    double inflation = 2.0;
    /// For every parent point, the (sorted) net slots whose ball contains it.
    std::vector<std::vector<std::uint32_t>> balls_of_point;
    /// Set when the net scale falls below the sample resolution.
    std::optional<std::string> resolution_warning;

    std::size_t ball_count() const { return net.members.size(); }
};

/// Intersection graph of a k-ball cover, witnessed by shared sample points.
struct NerveGraph {
    std::shared_ptr<const KBallCover> cover;
    std::vector<std::vector<std::uint32_t>> adjacency;  ///< sorted, symmetric, loop-free
    std::size_t edge_count = 0;
    std::size_t max_degree = 0;
};

/// Chain distances for a list of queried pairs at one k.
struct ChainDistanceTable {
    int k = 0;
    std::vector<std::pair<Index, Index>> pairs;
    /// Shortest chain length in balls; nullopt when the nerve disconnects the pair.
    std::vector<std::optional<std::size_t>> lengths;
    /// lengths * e^{-k}; +inf when unreachable.
    std::vector<double> values;
};

struct DesnowflakeOptions {
    double mesh_factor = 3.0;    ///< admit k while e^{-eps k} >= mesh_factor * mesh
    double pair_factor = 10.0;   ///< sample pairs with d >= pair_factor * mesh
    double inflation = 2.0;      ///< ball radius multiplier
    /// Optional ground truth for d^{1/eps} (e.g. the pre-snowflake metric). Must
    /// be indexed like the input; only ratios matter, so any scale works.
    const FiniteMetricSpace* reference = nullptr;
};

/// One k of a de-snowflaking run.
struct DesnowflakeLevel {
    int k = 0;
    std::size_t net_size = 0;
    std::size_t max_degree = 0;
    std::vector<std::optional<std::size_t>> chain_lengths;  ///< per sampled pair
    std::vector<double> d_k;                                ///< per sampled pair
    std::vector<char> in_band;  ///< pair counted in the band at this k
    double band_low = 0.0;
    double band_high = 0.0;
    std::size_t band_pairs = 0;
    /// Chain length >= shortest discrete (4 e^{-eps k})-path length, for every pair.
    bool path_lower_bound_holds = true;
};

struct DesnowflakeReport {
    double eps = 1.0;
    int requested_kmin = 0, requested_kmax = 0;
    int kmin = 0, kmax = 0;       ///< resolved window actually used
    int resolved_kmax = 0;        ///< largest admissible k for this sample
    double mesh = 0.0;            ///< of the normalized input
    double normalization = 1.0;   ///< original diameter
    double pair_threshold = 0.0;  ///< normalized distance floor for sampled pairs
    double mesh_factor = 3.0, pair_factor = 10.0, inflation = 2.0;
    bool uses_reference = false;
    std::vector<std::pair<Index, Index>> pairs;
    std::vector<double> pair_distance;   ///< normalized d(x, y)
    std::vector<double> pair_target;     ///< d^{1/eps} (or reference value)
    std::vector<DesnowflakeLevel> levels;
    double band_low = 0.0, band_high = 0.0;  ///< over all levels
    /// min over included (pair, k) of d_k / target: the fitted lower-bound constant.
    double lower_constant = 0.0;
    bool path_lower_bound_holds = true;
    /// Raw chain lengths nondecreasing in k for every pair (reported, not asserted).
    bool monotone_refinement = true;

    double band_ratio() const { return band_high / band_low; }
};

struct IterationLemmaReport {
    double eps = 1.0;
    int m = 0, k = 0;
    std::vector<std::pair<Index, Index>> pairs;
    std::vector<std::optional<std::size_t>> chain_lengths;
    double empirical_C = 0.0;  ///< max length / e^{k-m}
    std::size_t unreachable = 0;
};

/// Largest k with e^{-eps k} >= mesh_factor * mesh for a normalized space.
int resolved_kmax(double mesh, double eps, double mesh_factor = 3.0);

/// Normalizes (recording the factor) and builds the k-ball cover.
KBallCover build_cover(const FiniteMetricSpace& space, double eps, int k, std::uint64_t seed,
                       double inflation = 2.0);

/// Same, sharing an already normalized parent between several covers.
KBallCover build_cover(std::shared_ptr<const FiniteMetricSpace> normalized, double normalization,
                       double eps, int k, std::uint64_t seed, double inflation = 2.0);

/// Exhaustive check of both cover invariants (maximal separated net, balls cover).
bool verify_cover(const KBallCover& cover);

NerveGraph build_nerve(std::shared_ptr<const KBallCover> cover);

/// Multi-source BFS from the balls containing x to those containing y.
ChainDistanceTable chain_distance(const NerveGraph& nerve,
                                  const std::vector<std::pair<Index, Index>>& pairs);

/// BFS hop counts (in balls, sources at 1) from a set of source balls.
std::vector<std::size_t> ball_distances(const NerveGraph& nerve,
                                        const std::vector<std::uint32_t>& sources);

DesnowflakeReport desnowflake(const FiniteMetricSpace& space, double eps, int kmin, int kmax,
                              std::size_t pair_budget, std::uint64_t seed,
                              const DesnowflakeOptions& options = {});

/// Empirical constant of the chain-length bound between B(x, e^{-eps m}) and
/// B(y, e^{-eps m}) for pairs with d(x, y) <= e^{-eps (m-1)}.
IterationLemmaReport iteration_lemma_check(const FiniteMetricSpace& space, double eps, int m,
                                           int k, std::size_t pair_budget, std::uint64_t seed,
                                           double inflation = 2.0);

}  // namespace qmr
