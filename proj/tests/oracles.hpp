#pragma once
// Brute-force reference computations used only by the tests. Each one is
// written from the defining formula, independently of the library code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <vector>

#include "qmr/chain_metric.hpp"
#include "qmr/metric_space.hpp"

namespace oracle {

// #{g in PSL(2,Z) : d(2i, g 2i) <= R}. For g = (a b; c d) and z = iy,
// 2 cosh d(z, gz) = a^2 + d^2 + b^2/y^2 + c^2 y^2. Integer loops over
// (a, b, c) with ad - bc = 1; matrices come in +- pairs.
inline std::uint64_t psl2z_count(double R) {
    const double X = 2.0 * std::cosh(R) * (1.0 + 1e-12);
    const long amax = static_cast<long>(std::sqrt(X)) + 1;
    const long bmax = static_cast<long>(2.0 * std::sqrt(X)) + 1;
    const long cmax = static_cast<long>(std::sqrt(X) / 2.0) + 1;
    std::uint64_t matrices = 0;
    auto fits = [X](long a, long b, long c, long d) {
        return double(a) * a + double(d) * d + double(b) * b / 4.0 + 4.0 * double(c) * c <= X;
    };
    for (long a = -amax; a <= amax; ++a)
        for (long b = -bmax; b <= bmax; ++b)
            for (long c = -cmax; c <= cmax; ++c) {
                if (a != 0) {
                    const long num = 1 + b * c;
                    if (num % a != 0) continue;
                    if (fits(a, b, c, num / a)) ++matrices;
                } else if (b * c == -1) {
                    for (long d = -amax; d <= amax; ++d)
                        if (fits(a, b, c, d)) ++matrices;
                }
            }
    return matrices / 2;
}

// Orbit of the origin under a translation of length ell: n ell <= R.
inline std::uint64_t cyclic_count(double R, double ell) { return 2 * static_cast<std::uint64_t>(std::floor(R / ell)) + 1; }

// delta at base p from the sum form: for an ordered triple (x, y, z),
// min((x|z), (y|z)) - (x|y) = (S1 - max(S2, S3)) / 2 with
// S1 = d(x,y) + d(p,z), S2 = d(x,z) + d(p,y), S3 = d(y,z) + d(p,x).
inline double delta_at(const qmr::FiniteMetricSpace& X, qmr::Index p) {
    double best = 0.0;
    const auto n = X.size();
    for (qmr::Index x = 0; x < n; ++x)
        for (qmr::Index y = 0; y < n; ++y)
            for (qmr::Index z = 0; z < n; ++z) {
                const double s1 = X(x, y) + X(p, z), s2 = X(x, z) + X(p, y), s3 = X(y, z) + X(p, x);
                best = std::max(best, (s1 - std::max(s2, s3)) / 2.0);
            }
    return best;
}

// Shortest chain of balls from x to y, rebuilt from the cover's net and radius
// alone: membership by direct distance tests, adjacency by a shared point,
// BFS counted in balls. Returns SIZE_MAX when unreachable.
inline std::size_t chain_length(const qmr::KBallCover& cover, qmr::Index x, qmr::Index y) {
    const auto& P = *cover.parent;
    const auto& net = cover.net.members;
    const std::size_t m = net.size();
    std::vector<std::vector<char>> in(m, std::vector<char>(P.size(), 0));
    for (std::size_t b = 0; b < m; ++b)
        for (qmr::Index q = 0; q < P.size(); ++q) in[b][q] = P(net[b], q) <= cover.ball_radius;
    auto adjacent = [&](std::size_t u, std::size_t v) {
        for (qmr::Index q = 0; q < P.size(); ++q)
            if (in[u][q] && in[v][q]) return true;
        return false;
    };
    std::vector<std::size_t> dist(m, SIZE_MAX);
    std::queue<std::size_t> Q;
    for (std::size_t b = 0; b < m; ++b)
        if (in[b][x]) {
            dist[b] = 1;
            Q.push(b);
        }
    while (!Q.empty()) {
        const auto u = Q.front();
        Q.pop();
        if (in[u][y]) return dist[u];
        for (std::size_t v = 0; v < m; ++v)
            if (dist[v] == SIZE_MAX && adjacent(u, v)) {
                dist[v] = dist[u] + 1;
                Q.push(v);
            }
    }
    return SIZE_MAX;
}

// Level-L Koch polyline vertices from (0,0) to (1,0), by direct recursion.
inline std::vector<std::array<double, 2>> koch_vertices(int level) {
    std::vector<std::array<double, 2>> pts{{0.0, 0.0}, {1.0, 0.0}};
    // Middle vertex: the middle third turned by +60 degrees.
    const double c = 0.5, s = -std::sqrt(3.0) / 2.0;
    for (int l = 0; l < level; ++l) {
        std::vector<std::array<double, 2>> next;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto a = pts[i], b = pts[i + 1];
            const double dx = (b[0] - a[0]) / 3, dy = (b[1] - a[1]) / 3;
            const std::array<double, 2> p1{a[0] + dx, a[1] + dy}, p3{a[0] + 2 * dx, a[1] + 2 * dy};
            const std::array<double, 2> p2{p1[0] + c * dx + s * dy, p1[1] - s * dx + c * dy};
            next.insert(next.end(), {a, p1, p2, p3});
        }
        next.push_back(pts.back());
        pts = std::move(next);
    }
    return pts;
}

// Occupied cells of a side-r grid, sampling every polyline segment finely.
inline std::size_t koch_box_count(int level, double r) {
    const auto pts = koch_vertices(level);
    std::set<std::pair<long, long>> cells;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (int t = 0; t <= 8; ++t) {
            const double u = t / 8.0;
            const double x = pts[i][0] + u * (pts[i + 1][0] - pts[i][0]);
            const double y = pts[i][1] + u * (pts[i + 1][1] - pts[i][1]);
            cells.insert({static_cast<long>(std::floor(x / r)), static_cast<long>(std::floor(y / r))});
        }
    return cells.size();
}

}  // namespace oracle
