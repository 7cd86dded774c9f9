#include "qmr/metric_core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "qmr/errors.hpp"
#include "qmr/rng.hpp"

namespace qmr {

Quadruple::Quadruple(Index a, Index b, Index c, Index d) : idx{a, b, c, d} {
    for (int s = 0; s < 4; ++s)
        for (int t = s + 1; t < 4; ++t)
            if (idx[s] == idx[t]) {
                throw InvalidQuadruple("quadruple repeats index " + std::to_string(idx[s]));
            }
}

double cross_ratio(const FiniteMetricSpace& space, const Quadruple& q) {
    const std::size_t n = space.size();
    for (Index i : q.idx)
        if (i >= n) throw InvalidQuadruple("quadruple index out of range");
    return space(q[0], q[2]) * space(q[1], q[3]) / (space(q[0], q[3]) * space(q[1], q[2]));
}

FiniteMetricSpace snowflake(const FiniteMetricSpace& space, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw ParameterError("snowflake exponent must lie in (0, 1]; got " + std::to_string(eps));
    }
    std::vector<double> dist(space.matrix());
    if (eps != 1.0) {
        for (double& d : dist) d = d > 0.0 ? std::pow(d, eps) : 0.0;
    }
    std::string label = space.label() + "^" + std::to_string(eps);
    // A power of a metric with exponent <= 1 is a metric; sampled validation
    // keeps large generated spaces cheap.
    return FiniteMetricSpace(space.size(), std::move(dist), std::move(label),
                             Validation::automatic, space.coords());
}

std::vector<Index> seeded_order(std::size_t n, std::uint64_t seed) {
    std::vector<Index> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    return order;
}

std::vector<Index> greedy_net(std::size_t n, const std::function<double(Index, Index)>& dist,
                              double sep, std::span<const Index> order) {
    if (!(sep > 0.0)) throw ParameterError("net separation must be positive");
    if (order.size() != n) throw ShapeError("net scan order must list every point");
    std::vector<Index> members;
    for (Index p : order) {
        bool far = true;
        for (Index m : members) {
            if (dist(p, m) < sep) {
                far = false;
                break;
            }
        }
        if (far) members.push_back(p);
    }
    return members;
}

Net max_separated_net(const FiniteMetricSpace& space, double sep, std::span<const Index> order) {
    if (!(sep > 0.0)) throw ParameterError("net separation must be positive");
    if (order.size() != space.size()) throw ShapeError("net scan order must list every point");
    Net net;
    net.separation = sep;
    for (Index p : order) {
        const auto row = space.row(p);
        bool far = true;
        for (Index m : net.members) {
            if (row[m] < sep) {
                far = false;
                break;
            }
        }
        if (far) net.members.push_back(p);
    }
    return net;
}

Net max_separated_net(const FiniteMetricSpace& space, double sep, std::uint64_t seed) {
    const auto order = seeded_order(space.size(), seed);
    return max_separated_net(space, sep, order);
}

bool verify_net(const FiniteMetricSpace& space, const Net& net) {
    for (std::size_t a = 0; a < net.members.size(); ++a)
        for (std::size_t b = a + 1; b < net.members.size(); ++b)
            if (space(net.members[a], net.members[b]) < net.separation) return false;
    for (Index p = 0; p < space.size(); ++p) {
        bool covered = false;
        for (Index m : net.members) {
            if (space(p, m) < net.separation) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return !net.members.empty() || space.size() == 0;
}

namespace {

void check_correspondence(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                          std::span<const Index> correspondence) {
    if (source.size() != target.size()) {
        throw ShapeError("source has " + std::to_string(source.size()) + " points, target has " +
                         std::to_string(target.size()));
    }
    if (correspondence.size() != source.size()) {
        throw ShapeError("correspondence must map every source point");
    }
    std::vector<char> hit(target.size(), 0);
    for (Index i : correspondence) {
        if (i >= target.size() || hit[i]) throw ShapeError("correspondence is not a bijection");
        hit[i] = 1;
    }
}

std::uint64_t ordered_quadruple_count(std::size_t n) {
    if (n < 4) return 0;
    const long double c = static_cast<long double>(n) * (n - 1) * (n - 2) * (n - 3);
    if (c > 1.8e19L) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(n) * (n - 1) * (n - 2) * (n - 3);
}

struct Worst {
    double ratio = -1.0;
    Quadruple q;
    void offer(double r, const Quadruple& cand) {
        if (r > ratio || (r == ratio && cand < q)) {
            ratio = r;
            q = cand;
        }
    }
};

}  // namespace

std::vector<Quadruple> sample_quadruples(std::size_t n, std::uint64_t budget, std::uint64_t seed) {
    std::vector<Quadruple> out;
    const std::uint64_t total = ordered_quadruple_count(n);
    if (total == 0) return out;
    if (total <= budget) {
        out.reserve(total);
        for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
                for (Index c = 0; c < n; ++c)
                    for (Index d = 0; d < n; ++d)
                        if (a != b && a != c && a != d && b != c && b != d && c != d)
                            out.emplace_back(a, b, c, d);
        return out;
    }
    Rng rng(seed);
    std::unordered_set<std::uint64_t> seen;
    out.reserve(budget);
    while (out.size() < budget) {
        const Index a = rng.index(n), b = rng.index(n), c = rng.index(n), d = rng.index(n);
        if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
        const std::uint64_t key = ((static_cast<std::uint64_t>(a) * n + b) * n + c) * n + d;
        if (!seen.insert(key).second) continue;
        out.emplace_back(a, b, c, d);
    }
    return out;
}

DistortionReport qm_distortion_on(const FiniteMetricSpace& source,
                                  const FiniteMetricSpace& target,
                                  std::span<const Index> correspondence,
                                  std::span<const Quadruple> quadruples, std::string map_label) {
    check_correspondence(source, target, correspondence);
    Worst worst;
    for (const Quadruple& q : quadruples) {
        const Quadruple image(correspondence[q[0]], correspondence[q[1]], correspondence[q[2]],
                              correspondence[q[3]]);
        worst.offer(cross_ratio(target, image) / cross_ratio(source, q), q);
    }
    DistortionReport report;
    report.map_label = std::move(map_label);
    report.sample_count = quadruples.size();
    if (!quadruples.empty()) {
        report.linear_constant_C = std::max(1.0, worst.ratio);
        report.worst_quadruple = worst.q;
    }
    return report;
}

DistortionReport qm_distortion(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                               std::span<const Index> correspondence,
                               std::uint64_t quadruple_budget, std::uint64_t seed,
                               std::string map_label) {
    check_correspondence(source, target, correspondence);
    const std::uint64_t total = ordered_quadruple_count(source.size());
    const bool exhaustive = total <= quadruple_budget;
    DistortionReport report;
    if (exhaustive) {
        // Stream the full enumeration instead of materialising it.
        const std::size_t n = source.size();
        Worst worst;
        for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b) {
                if (b == a) continue;
                for (Index c = 0; c < n; ++c) {
                    if (c == a || c == b) continue;
                    for (Index d = 0; d < n; ++d) {
                        if (d == a || d == b || d == c) continue;
                        const double src = source(a, c) * source(b, d) /
                                           (source(a, d) * source(b, c));
                        const Index fa = correspondence[a], fb = correspondence[b],
                                    fc = correspondence[c], fd = correspondence[d];
                        const double tgt = target(fa, fc) * target(fb, fd) /
                                           (target(fa, fd) * target(fb, fc));
                        const double r = tgt / src;
                        if (r > worst.ratio) worst.offer(r, Quadruple(a, b, c, d));
                    }
                }
            }
        report.map_label = std::move(map_label);
        report.sample_count = total;
        if (total > 0) {
            report.linear_constant_C = std::max(1.0, worst.ratio);
            report.worst_quadruple = worst.q;
        }
    } else {
        const auto sample = sample_quadruples(source.size(), quadruple_budget, seed);
        report = qm_distortion_on(source, target, correspondence, sample, std::move(map_label));
    }
    report.exhaustive = exhaustive;
    return report;
}

double bilipschitz_distortion(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                              std::span<const Index> correspondence) {
    check_correspondence(source, target, correspondence);
    double worst = 1.0;
    const std::size_t n = source.size();
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double s = source(i, j);
            const double t = target(correspondence[i], correspondence[j]);
            worst = std::max({worst, t / s, s / t});
        }
    return worst;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ParameterError("slope fit needs at least two points");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw ParameterError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

RegularityFit ahlfors_fit(const FiniteMetricSpace& space, double alpha,
                          std::vector<double> scale_grid, std::uint64_t seed,
                          double slope_tolerance) {
    if (scale_grid.empty()) throw ParameterError("regularity fit needs a nonempty scale grid");
    if (!(alpha > 0.0)) throw ParameterError("regularity dimension must be positive");
    const double diam = space.diam();
    std::sort(scale_grid.begin(), scale_grid.end(), std::greater<>());
    for (std::size_t i = 0; i < scale_grid.size(); ++i) {
        const double r = scale_grid[i];
        if (!(r > 0.0) || r > diam * (1.0 + 1e-12)) {
            throw ParameterError("scale " + std::to_string(r) + " outside (0, diam]");
        }
        if (i > 0 && r == scale_grid[i - 1]) throw ParameterError("repeated scale in grid");
    }
    RegularityFit fit;
    fit.dimension_alpha = alpha;
    const auto order = seeded_order(space.size(), seed);
    std::vector<double> xs, ys;
    for (double r : scale_grid) {
        const std::size_t count = max_separated_net(space, r, order).members.size();
        fit.scales.emplace_back(r, count);
        const double model = std::pow(r / diam, -alpha);
        fit.constant_C = std::max({fit.constant_C, count / model, model / count});
        xs.push_back(-std::log(r));
        ys.push_back(std::log(static_cast<double>(count)));
    }
    if (xs.size() >= 2) {
        fit.fitted_slope = least_squares_slope(xs, ys);
        fit.consistent = std::abs(fit.fitted_slope - alpha) <= slope_tolerance;
    }
    return fit;
}

std::vector<std::size_t> delta_path_lengths(const FiniteMetricSpace& space, Index i,
                                            double step) {
    if (!(step > 0.0)) throw ParameterError("path step must be positive");
    const std::size_t n = space.size();
    if (i >= n) throw ShapeError("path endpoint out of range");
    std::vector<std::size_t> hops(n, std::numeric_limits<std::size_t>::max());
    std::deque<Index> queue{i};
    hops[i] = 0;
    while (!queue.empty()) {
        const Index u = queue.front();
        queue.pop_front();
        const auto row = space.row(u);
        for (Index v = 0; v < n; ++v) {
            if (hops[v] == std::numeric_limits<std::size_t>::max() && row[v] <= step) {
                hops[v] = hops[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return hops;
}

std::optional<std::size_t> min_delta_path(const FiniteMetricSpace& space, Index i, Index j,
                                          double step) {
    if (j >= space.size()) throw ShapeError("path endpoint out of range");
    const auto hops = delta_path_lengths(space, i, step);
    if (hops[j] == std::numeric_limits<std::size_t>::max()) return std::nullopt;
    return hops[j];
}

}  // namespace qmr
