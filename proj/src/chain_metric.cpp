#include "qmr/chain_metric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "qmr/errors.hpp"
#include "qmr/rng.hpp"

namespace qmr {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Hop count from the source balls to the nearest target ball (sources count as 1).
std::optional<std::size_t> set_to_set(const NerveGraph& nerve,
                                      const std::vector<std::uint32_t>& sources,
                                      const std::vector<std::uint32_t>& targets) {
    if (sources.empty() || targets.empty()) return std::nullopt;
    const std::size_t m = nerve.adjacency.size();
    std::vector<char> is_target(m, 0);
    for (auto t : targets) is_target[t] = 1;
    std::vector<std::size_t> dist(m, kUnreached);
    std::deque<std::uint32_t> queue;
    for (auto s : sources) {
        if (is_target[s]) return 1;
        if (dist[s] == kUnreached) {
            dist[s] = 1;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (auto v : nerve.adjacency[u]) {
            if (dist[v] != kUnreached) continue;
            dist[v] = dist[u] + 1;
            if (is_target[v]) return dist[v];
            queue.push_back(v);
        }
    }
    return std::nullopt;
}

std::vector<std::uint32_t> balls_meeting(const KBallCover& cover, Index center, double radius) {
    std::set<std::uint32_t> hit;
    const auto& space = *cover.parent;
    const auto row = space.row(center);
    for (Index z = 0; z < space.size(); ++z) {
        if (row[z] < radius) {
            for (auto b : cover.balls_of_point[z]) hit.insert(b);
        }
    }
    return {hit.begin(), hit.end()};
}

}  // namespace

int resolved_kmax(double mesh, double eps, double mesh_factor) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    const double floor_scale = mesh_factor * mesh;
    if (!(floor_scale > 0.0)) return std::numeric_limits<int>::max();
    if (floor_scale > 1.0) return -1;
    return static_cast<int>(std::floor(-std::log(floor_scale) / eps + 1e-12));
}

KBallCover build_cover(const FiniteMetricSpace& space, double eps, int k, std::uint64_t seed,
                       double inflation) {
    auto normalized = std::make_shared<const FiniteMetricSpace>(space.normalized());
    return build_cover(std::move(normalized), space.diam(), eps, k, seed, inflation);
}

KBallCover build_cover(std::shared_ptr<const FiniteMetricSpace> normalized, double normalization,
                       double eps, int k, std::uint64_t seed, double inflation) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("cover eps must lie in (0, 1]");
    if (k < 0) throw ParameterError("cover level k must be nonnegative");
    if (!(inflation >= 1.0)) throw ParameterError("ball inflation must be at least 1");
    if (normalized->size() > 1 && std::abs(normalized->diam() - 1.0) > 1e-9) {
        throw ParameterError("cover parent must be normalized to diameter 1");
    }
    KBallCover cover;
    cover.parent = std::move(normalized);
    cover.normalization = normalization;
    cover.eps = eps;
    cover.k = k;
    cover.inflation = inflation;
    const double sep = std::exp(-eps * k);
    cover.ball_radius = inflation * sep;
    cover.net = max_separated_net(*cover.parent, sep, seed);

    const auto& space = *cover.parent;
    cover.balls_of_point.resize(space.size());
    for (Index p = 0; p < space.size(); ++p) {
        const auto row = space.row(p);
        for (std::uint32_t b = 0; b < cover.net.members.size(); ++b) {
            if (row[cover.net.members[b]] < cover.ball_radius) cover.balls_of_point[p].push_back(b);
        }
    }
    if (space.size() > 1 && sep < space.min_distance()) {
        std::ostringstream os;
        os << "net scale e^{-eps k} = " << sep << " is below the minimum sample distance "
           << space.min_distance() << "; d_k at k = " << k << " reflects the sample";
        cover.resolution_warning = os.str();
    }
    return cover;
}

bool verify_cover(const KBallCover& cover) {
    if (!verify_net(*cover.parent, cover.net)) return false;
    const auto& space = *cover.parent;
    for (Index p = 0; p < space.size(); ++p) {
        if (cover.balls_of_point[p].empty()) return false;
        for (auto b : cover.balls_of_point[p])
            if (!(space(p, cover.net.members[b]) < cover.ball_radius)) return false;
    }
    return true;
}

NerveGraph build_nerve(std::shared_ptr<const KBallCover> cover) {
    NerveGraph nerve;
    const std::size_t m = cover->ball_count();
    std::vector<std::vector<std::uint32_t>> adj(m);
    for (const auto& balls : cover->balls_of_point) {
        for (std::size_t a = 0; a < balls.size(); ++a)
            for (std::size_t b = a + 1; b < balls.size(); ++b) {
                adj[balls[a]].push_back(balls[b]);
                adj[balls[b]].push_back(balls[a]);
            }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        nerve.edge_count += list.size();
        nerve.max_degree = std::max(nerve.max_degree, list.size());
    }
    nerve.edge_count /= 2;
    nerve.adjacency = std::move(adj);
    nerve.cover = std::move(cover);
    return nerve;
}

std::vector<std::size_t> ball_distances(const NerveGraph& nerve,
                                        const std::vector<std::uint32_t>& sources) {
    std::vector<std::size_t> dist(nerve.adjacency.size(), kUnreached);
    std::deque<std::uint32_t> queue;
    for (auto s : sources) {
        if (dist[s] == kUnreached) {
            dist[s] = 1;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (auto v : nerve.adjacency[u]) {
            if (dist[v] == kUnreached) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

ChainDistanceTable chain_distance(const NerveGraph& nerve,
                                  const std::vector<std::pair<Index, Index>>& pairs) {
    const KBallCover& cover = *nerve.cover;
    ChainDistanceTable table;
    table.k = cover.k;
    table.pairs = pairs;
    const double unit = std::exp(-static_cast<double>(cover.k));
    for (const auto& [x, y] : pairs) {
        if (x >= cover.balls_of_point.size() || y >= cover.balls_of_point.size()) {
            throw ShapeError("chain query index out of range");
        }
        if (cover.balls_of_point[x].empty() || cover.balls_of_point[y].empty()) {
            throw ParameterError("queried point is not covered by any ball");
        }
        auto len = set_to_set(nerve, cover.balls_of_point[x], cover.balls_of_point[y]);
        table.lengths.push_back(len);
        table.values.push_back(len ? static_cast<double>(*len) * unit
                                   : std::numeric_limits<double>::infinity());
    }
    return table;
}

DesnowflakeReport desnowflake(const FiniteMetricSpace& space, double eps, int kmin, int kmax,
                              std::size_t pair_budget, std::uint64_t seed,
                              const DesnowflakeOptions& options) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in (0, 1]");
    if (kmin > kmax) throw ParameterError("empty k window");
    if (pair_budget == 0) throw ParameterError("pair budget must be positive");
    if (space.size() < 2) throw ParameterError("need at least two points");
    if (options.reference && options.reference->size() != space.size()) {
        throw ShapeError("reference metric has a different point count");
    }

    DesnowflakeReport report;
    report.eps = eps;
    report.requested_kmin = kmin;
    report.requested_kmax = kmax;
    report.mesh_factor = options.mesh_factor;
    report.pair_factor = options.pair_factor;
    report.inflation = options.inflation;
    report.uses_reference = options.reference != nullptr;
    report.normalization = space.diam();

    auto normalized = std::make_shared<const FiniteMetricSpace>(space.normalized());
    const auto& d = *normalized;
    report.mesh = d.mesh();
    report.resolved_kmax = resolved_kmax(report.mesh, eps, options.mesh_factor);
    report.kmin = std::max(kmin, 0);
    report.kmax = std::min(kmax, report.resolved_kmax);
    if (report.kmin > report.kmax) {
        std::ostringstream os;
        os << "no resolved k in [" << kmin << ", " << kmax << "]: sample mesh " << report.mesh
           << " admits k only while e^{-" << eps << " k} >= " << options.mesh_factor
           << " * mesh, i.e. k <= " << report.resolved_kmax;
        throw ResolutionError(os.str());
    }

    // Pair sample: distinct unordered pairs above the mesh threshold.
    report.pair_threshold = options.pair_factor * report.mesh;
    std::size_t eligible = 0;
    for (Index i = 0; i < d.size(); ++i)
        for (Index j = i + 1; j < d.size(); ++j)
            if (d(i, j) >= report.pair_threshold) ++eligible;
    if (eligible == 0) {
        throw ResolutionError("no pair lies above " + std::to_string(options.pair_factor) +
                              " x mesh; sample too coarse for a band");
    }
    const std::size_t want = std::min(pair_budget, eligible);
    Rng rng(Rng::derive(seed, 0x9a1e));
    std::set<std::pair<Index, Index>> chosen;
    while (chosen.size() < want) {
        Index a = rng.index(d.size()), b = rng.index(d.size());
        if (a == b || d(a, b) < report.pair_threshold) continue;
        if (a > b) std::swap(a, b);
        if (chosen.insert({a, b}).second) report.pairs.emplace_back(a, b);
    }
    for (const auto& [a, b] : report.pairs) {
        report.pair_distance.push_back(d(a, b));
        report.pair_target.push_back(options.reference ? (*options.reference)(a, b)
                                                       : std::pow(d(a, b), 1.0 / eps));
    }

    report.band_low = std::numeric_limits<double>::infinity();
    report.band_high = 0.0;
    report.lower_constant = std::numeric_limits<double>::infinity();
    constexpr std::size_t kPathChecks = 24;

    for (int k = report.kmin; k <= report.kmax; ++k) {
        auto cover = std::make_shared<const KBallCover>(build_cover(
            normalized, report.normalization, eps, k, Rng::derive(seed, 1000 + k),
            options.inflation));
        const NerveGraph nerve = build_nerve(cover);
        const ChainDistanceTable table = chain_distance(nerve, report.pairs);

        DesnowflakeLevel level;
        level.k = k;
        level.net_size = cover->ball_count();
        level.max_degree = nerve.max_degree;
        level.chain_lengths = table.lengths;
        level.d_k = table.values;
        level.in_band.assign(report.pairs.size(), 0);
        level.band_low = std::numeric_limits<double>::infinity();
        level.band_high = 0.0;
        const double scale = std::exp(-eps * k);
        for (std::size_t p = 0; p < report.pairs.size(); ++p) {
            if (!table.lengths[p]) continue;
            // The two-sided comparison is claimed once the pair is resolved at scale k.
            if (report.pair_distance[p] < scale) continue;
            const double ratio = table.values[p] / report.pair_target[p];
            level.in_band[p] = 1;
            ++level.band_pairs;
            level.band_low = std::min(level.band_low, ratio);
            level.band_high = std::max(level.band_high, ratio);
        }
        // Chains through k-balls induce discrete (4 e^{-eps k})-paths.
        const double step = 2.0 * options.inflation * scale;
        for (std::size_t p = 0; p < std::min(kPathChecks, report.pairs.size()); ++p) {
            const auto hops = min_delta_path(d, report.pairs[p].first, report.pairs[p].second, step);
            if (table.lengths[p] && hops && *table.lengths[p] < *hops) {
                level.path_lower_bound_holds = false;
            }
        }
        if (level.band_pairs > 0) {
            report.band_low = std::min(report.band_low, level.band_low);
            report.band_high = std::max(report.band_high, level.band_high);
            report.lower_constant = std::min(report.lower_constant, level.band_low);
        }
        report.path_lower_bound_holds = report.path_lower_bound_holds && level.path_lower_bound_holds;
        report.levels.push_back(std::move(level));
    }
    for (std::size_t p = 0; p < report.pairs.size(); ++p) {
        for (std::size_t l = 1; l < report.levels.size(); ++l) {
            const auto& prev = report.levels[l - 1].chain_lengths[p];
            const auto& cur = report.levels[l].chain_lengths[p];
            if (prev && cur && *cur < *prev) report.monotone_refinement = false;
        }
    }
    if (!(report.band_high > 0.0)) {
        throw ResolutionError("no sampled pair is resolved inside the k window");
    }
    return report;
}

IterationLemmaReport iteration_lemma_check(const FiniteMetricSpace& space, double eps, int m,
                                           int k, std::size_t pair_budget, std::uint64_t seed,
                                           double inflation) {
    if (m < 1 || k < m) throw ParameterError("need 1 <= m <= k");
    if (pair_budget == 0) throw ParameterError("pair budget must be positive");
    auto normalized = std::make_shared<const FiniteMetricSpace>(space.normalized());
    auto cover = std::make_shared<const KBallCover>(
        build_cover(normalized, space.diam(), eps, k, Rng::derive(seed, 7), inflation));
    const NerveGraph nerve = build_nerve(cover);
    const auto& d = *normalized;

    IterationLemmaReport report;
    report.eps = eps;
    report.m = m;
    report.k = k;
    const double reach = std::exp(-eps * (m - 1));
    const double ball = std::exp(-eps * m);
    Rng rng(Rng::derive(seed, 11));
    std::set<std::pair<Index, Index>> chosen;
    std::size_t attempts = 0;
    while (chosen.size() < pair_budget && attempts < 50 * pair_budget) {
        ++attempts;
        const Index x = rng.index(d.size());
        std::vector<Index> near;
        for (Index y = 0; y < d.size(); ++y)
            if (y != x && d(x, y) <= reach) near.push_back(y);
        if (near.empty()) continue;
        Index y = near[rng.index(near.size())];
        Index a = std::min(x, y), b = std::max(x, y);
        if (chosen.insert({a, b}).second) report.pairs.emplace_back(a, b);
    }
    const double unit = std::exp(static_cast<double>(k - m));
    for (const auto& [x, y] : report.pairs) {
        auto len = set_to_set(nerve, balls_meeting(*cover, x, ball), balls_meeting(*cover, y, ball));
        report.chain_lengths.push_back(len);
        if (!len) {
            ++report.unreachable;
            continue;
        }
        report.empirical_C = std::max(report.empirical_C, static_cast<double>(*len) / unit);
    }
    return report;
}

}  // namespace qmr
