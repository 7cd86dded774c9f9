#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "oracles.hpp"
#include "qmr/chain_metric.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/rng.hpp"

using namespace qmr;

namespace {

FiniteMetricSpace segment(std::size_t n) {
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({double(i) / double(n - 1)});
    return FiniteMetricSpace::euclidean(pts);
}

// Each value within a factor 2 of the geometric mean.
bool within_2x(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += std::log(x);
    const double gm = std::exp(s / v.size());
    for (double x : v)
        if (x > 2 * gm || x < gm / 2) return false;
    return true;
}

}  // namespace

TEST_CASE("k = 0 cover is at diameter scale") {
    const auto C = circle_snowflake(512, 1.0);
    const auto cover = build_cover(C, 1.0, 0, 3);
    CHECK(cover.net.separation == doctest::Approx(1.0));
    CHECK(cover.ball_count() >= 1);
    CHECK(cover.ball_count() <= 2);  // only antipodal points are 1 apart after normalization
    CHECK(verify_cover(cover));
}

TEST_CASE("circle net count at k = 3") {
    const auto C = circle_snowflake(4096, 1.0);
    const auto cover = build_cover(C, 1.0, 3, 9);
    CHECK(verify_cover(cover));
    // Normalized circle: circumference pi; a maximal s-net along it has
    // between pi/(2s) and pi/s members up to chord/arc slack.
    const double s = std::exp(-3.0);
    const double count = static_cast<double>(cover.ball_count());
    CHECK(count >= 0.95 * std::numbers::pi / (2 * s));
    CHECK(count <= 1.05 * std::numbers::pi / s);
    CHECK(count >= std::exp(3.0) / 4);
    CHECK(count <= 4 * std::exp(3.0));
}

TEST_CASE("covers are maximal nets whose balls cover, for several seeds and k") {
    const auto X = euclidean_cloud(400, 2, 17);
    for (int k = 1; k <= 4; ++k)
        for (std::uint64_t s = 0; s < 3; ++s) CHECK(verify_cover(build_cover(X, 1.0, k, s)));
}

TEST_CASE("nerve edges need a shared point") {
    const auto C = circle_snowflake(1024, 1.0);
    for (int k = 2; k <= 5; ++k) {
        auto cover = std::make_shared<const KBallCover>(build_cover(C, 1.0, k, 1));
        const auto nerve = build_nerve(cover);
        const auto& P = *cover->parent;
        for (std::size_t u = 0; u < nerve.adjacency.size(); ++u)
            for (auto v : nerve.adjacency[u]) {
                CHECK(v != u);
                CHECK(P(cover->net.members[u], cover->net.members[v]) <= 2 * cover->ball_radius + 1e-12);
                const auto& back = nerve.adjacency[v];
                CHECK(std::find(back.begin(), back.end(), u) != back.end());
            }
    }
}

TEST_CASE("circle nerves are cycle-like with k-independent degree") {
    const auto C = circle_snowflake(4096, 1.0);
    std::vector<double> degrees;
    for (int k = 2; k <= 6; ++k) {
        auto cover = std::make_shared<const KBallCover>(build_cover(C, 1.0, k, 2));
        const auto nerve = build_nerve(cover);
        degrees.push_back(static_cast<double>(nerve.max_degree));
        // Every ball meets its two arc neighbours.
        for (const auto& adj : nerve.adjacency) CHECK(adj.size() >= 2);
    }
    CHECK(*std::max_element(degrees.begin(), degrees.end()) <= 10);
    CHECK(within_2x(degrees));
}

TEST_CASE("chain distances") {
    const auto C = circle_snowflake(600, 1.0);
    const int k = 3;
    auto cover = std::make_shared<const KBallCover>(build_cover(C, 1.0, k, 5));
    const auto nerve = build_nerve(cover);

    SUBCASE("d_k(x, x) = e^-k") {
        const auto t = chain_distance(nerve, {{7, 7}, {100, 100}});
        for (double v : t.values) CHECK(v == doctest::Approx(std::exp(-k)));
    }
    SUBCASE("two points in one ball") {
        const Index c = cover->net.members[0];
        const auto t = chain_distance(nerve, {{c, c + 1}});
        CHECK(t.values[0] == doctest::Approx(std::exp(-k)));
    }
    SUBCASE("BFS agrees with the brute-force chain oracle") {
        Rng rng(12);
        std::vector<std::pair<Index, Index>> pairs;
        for (int i = 0; i < 60; ++i) pairs.emplace_back(rng.index(C.size()), rng.index(C.size()));
        const auto t = chain_distance(nerve, pairs);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            REQUIRE(t.lengths[i].has_value());
            CHECK(*t.lengths[i] == oracle::chain_length(*cover, pairs[i].first, pairs[i].second));
        }
    }
    SUBCASE("triangle inequality up to the shared ball") {
        Rng rng(4);
        for (int i = 0; i < 200; ++i) {
            const Index x = rng.index(C.size()), y = rng.index(C.size()), z = rng.index(C.size());
            const auto t = chain_distance(nerve, {{x, z}, {x, y}, {y, z}});
            // A chain x..y and a chain y..z share a ball containing y.
            CHECK(*t.lengths[0] <= *t.lengths[1] + *t.lengths[2]);
        }
    }
}

TEST_CASE("chain distance on the circle tracks arc length") {
    const auto C = circle_snowflake(2048, 1.0);
    const auto rep = desnowflake(C, 1.0, 2, 6, 200, 31);
    CHECK(rep.path_lower_bound_holds);
    CHECK(rep.band_ratio() <= 8.0);
}

TEST_CASE("de-snowflaking a segment at eps = 1") {
    const auto S = segment(1500);
    const auto rep = desnowflake(S, 1.0, 0, 40, 300, 2);
    CHECK(rep.kmax <= rep.resolved_kmax);
    CHECK(rep.band_ratio() <= 8.0);
    CHECK(rep.path_lower_bound_holds);
}

TEST_CASE("de-snowflaking a snowflaked circle recovers d^2") {
    const auto X = circle_snowflake(2048, 0.5);
    const auto rep = desnowflake(X, 0.5, 0, 40, 300, 8);
    CHECK(rep.band_ratio() <= 16.0);
    CHECK(rep.path_lower_bound_holds);
    CHECK(rep.lower_constant > 0.0);
    for (const auto& lvl : rep.levels) CHECK(lvl.path_lower_bound_holds);
}

TEST_CASE("de-snowflake is deterministic per seed") {
    const auto X = circle_snowflake(1024, 0.5);
    const auto a = desnowflake(X, 0.5, 0, 40, 100, 77);
    const auto b = desnowflake(X, 0.5, 0, 40, 100, 77);
    CHECK(a.pairs == b.pairs);
    CHECK(a.band_low == b.band_low);
    CHECK(a.band_high == b.band_high);
}

TEST_CASE("requested window is clamped to the resolution") {
    const auto X = circle_snowflake(256, 1.0);
    const auto rep = desnowflake(X, 1.0, 0, 40, 50, 1);
    CHECK(rep.requested_kmax == 40);
    CHECK(rep.kmax == rep.resolved_kmax);
    CHECK(std::exp(-rep.kmax) >= rep.mesh_factor * rep.mesh);
    CHECK_THROWS(desnowflake(X, 0.0, 0, 5, 50, 1));
}

TEST_CASE("neighbouring m-balls join in about e^(k-m) balls") {
    SUBCASE("k = m needs only a few balls") {
        const auto C = circle_snowflake(2048, 1.0);
        const auto r = iteration_lemma_check(C, 1.0, 3, 3, 100, 5);
        CHECK(r.unreachable == 0);
        for (const auto& len : r.chain_lengths) CHECK(*len <= 4);
    }
    for (double eps : {1.0, 0.5}) {
        CAPTURE(eps);
        const auto C = circle_snowflake(4096, eps);
        std::vector<double> Cs;
        const int m0 = eps == 1.0 ? 2 : 3;
        for (int m = m0; m <= m0 + 1; ++m)
            for (int gap = 1; gap <= 3; ++gap) {
                const auto r = iteration_lemma_check(C, eps, m, m + gap, 100, 11);
                CHECK(r.unreachable == 0);
                Cs.push_back(r.empirical_C);
            }
        CHECK(within_2x(Cs));
    }
}
