#include <doctest.h>

#include <cmath>
#include <queue>

#include "qmr/cube_inequality.hpp"
#include "qmr/errors.hpp"
#include "qmr/sphere_geometry.hpp"

using namespace qmr;

namespace {

// Face-to-face chain length by BFS over a nerve built from pairwise box tests.
std::size_t bfs_face_chain(const CubeCover& c, int axis0) {
    const std::size_t N = c.size();
    std::vector<std::size_t> dist(N, SIZE_MAX);
    std::queue<std::size_t> Q;
    for (std::size_t i = 0; i < N; ++i)
        if (meets_face(c.sets[i], axis0, false)) {
            dist[i] = 1;
            Q.push(i);
        }
    while (!Q.empty()) {
        const auto u = Q.front();
        Q.pop();
        if (meets_face(c.sets[u], axis0, true)) return dist[u];
        for (std::size_t v = 0; v < N; ++v) {
            if (dist[v] != SIZE_MAX) continue;
            bool touch = false;
            for (const auto& a : c.sets[u].boxes)
                for (const auto& b : c.sets[v].boxes) {
                    bool meet = true;
                    for (int k = 0; k < c.n; ++k) meet = meet && a.lo[k] <= b.hi[k] && b.lo[k] <= a.hi[k];
                    touch = touch || meet;
                }
            if (touch) {
                dist[v] = dist[u] + 1;
                Q.push(v);
            }
        }
    }
    return SIZE_MAX;
}

}  // namespace

TEST_CASE("single set covers every face pair in one step") {
    for (int n = 1; n <= 3; ++n) {
        const auto c = single_set_cover(n);
        const auto r = check_length_volume(c);
        CHECK(r.N == 1);
        for (auto d : r.d) CHECK(d == 1);
        CHECK(r.holds);
        const auto f = chain_count_map(c);
        REQUIRE(f.f0.size() == 1);
        for (auto v : f.f0[0]) CHECK(v == 1);
    }
}

TEST_CASE("m x m grids achieve equality") {
    for (int m = 2; m <= 12; ++m) {
        CAPTURE(m);
        const auto c = grid_cover(2, m);
        const auto r = check_length_volume(c);
        CHECK(r.N == std::size_t(m * m));
        CHECK(r.d == std::vector<std::size_t>{std::size_t(m), std::size_t(m)});
        CHECK(r.product == doctest::Approx(double(m * m)));
        CHECK(bfs_face_chain(c, 0) == std::size_t(m));
        CHECK(bfs_face_chain(c, 1) == std::size_t(m));
    }
}

TEST_CASE("grid chain-count map follows the columns") {
    const int m = 5;
    const auto c = grid_cover(2, m);
    const auto f = chain_count_map(c);
    CHECK(f.face_claim_holds);
    CHECK(f.far_face_claim_holds);
    for (std::size_t i = 0; i < f.kept.size(); ++i) {
        const double x = f.witness_points[i][0];
        const auto column = static_cast<std::size_t>(std::floor(x * m)) + 1;
        CHECK(f.f0[i][0] == column);
    }
}

TEST_CASE("two slabs") {
    const auto c = slab_cover(2);
    CHECK(face_chain_distance(c, 1).d == 2);
    CHECK(face_chain_distance(c, 2).d == 1);
    const auto f = chain_count_map(c);
    std::vector<std::size_t> f1;
    for (const auto& row : f.f0) f1.push_back(row[0]);
    std::sort(f1.begin(), f1.end());
    CHECK(f1 == std::vector<std::size_t>{1, 2});
}

TEST_CASE("random covers satisfy N >= d_1...d_n and match the BFS oracle") {
    for (int n : {2, 3}) {
        for (std::uint64_t s = 0; s < (n == 2 ? 40u : 15u); ++s) {
            const auto c = random_box_cover(n, n == 2 ? 60 : 300, s);
            REQUIRE(covers_cube(c));
            const auto r = check_length_volume(c);
            CHECK(r.holds);
            CHECK(double(r.N) >= r.product);
            for (int k = 0; k < n; ++k) CHECK(r.d[k] == bfs_face_chain(c, k));
        }
    }
}

TEST_CASE("fuzzing finds no violation and is seed-deterministic") {
    const auto a = fuzz_length_volume(2, 100, 200, 5);
    CHECK(a.violations == 0);
    const auto b = fuzz_length_volume(2, 100, 200, 5);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].N == b.records[i].N);
        CHECK(a.records[i].d == b.records[i].d);
    }
}

TEST_CASE("chain-count map claims on random covers") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto f = chain_count_map(random_box_cover(2, 50, 100 + s));
        CHECK(f.face_claim_holds);
        CHECK(f.far_face_claim_holds);
    }
}

TEST_CASE("malformed covers are rejected") {
    CubeCover c;
    c.n = 2;
    c.sets.push_back({{Box{{0.0, 0.0}, {1.2, 1.0}}}});
    CHECK_THROWS(validate_cover(c));
    c.sets[0].boxes[0] = Box{{0.6, 0.0}, {0.4, 1.0}};
    CHECK_THROWS(validate_cover(c));
    c.sets[0].boxes.clear();
    CHECK_THROWS(validate_cover(c));
}

TEST_CASE("stereographic projection") {
    CHECK(norm(stereographic({0.0, 0.0, -1.0})) == doctest::Approx(0.0));
    const auto e = stereographic({1.0, 0.0, 0.0});
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(stereographic({0.0, 0.0, 1.0}), DomainError);
    const Vec y{0.3, -1.7};
    const auto back = stereographic(inverse_stereographic(y));
    CHECK(back[0] == doctest::Approx(y[0]));
    CHECK(back[1] == doctest::Approx(y[1]));
}

TEST_CASE("stereographic distortion outside a cap") {
    const auto s = stereo_sweep(2, 0.3, 5000, 3);
    CHECK(s.min_ratio > 0.0);
    // Constants stay bounded as the cap shrinks: ratio * delta^2 is O(1).
    const auto t = stereo_sweep(2, 0.15, 5000, 3);
    CHECK(t.c2 <= 4.0 * s.c2);
    CHECK(t.min_ratio >= 0.5 * s.min_ratio);
}

TEST_CASE("cube inside the sphere between antipodal caps") {
    const auto c = cube_in_sphere(antipodal_config(2, 0.2), 1);
    CHECK(c.faces_inside);
    CHECK(c.avoids_cap);
    CHECK(c.avoids_E);
    CHECK(c.min_opposite_distance >= c.fitted_c * std::pow(0.2, 3) - 1e-12);
    CHECK(c.fitted_c > 0.0);

    SUBCASE("n = 1 gives an arc") {
        const auto a = cube_in_sphere(antipodal_config(1, 0.2), 1);
        CHECK(a.faces_inside);
        CHECK(a.avoids_E);
    }
    SUBCASE("halving delta shrinks the face distance by at most 8") {
        double prev = c.min_opposite_distance;
        for (double d : {0.1, 0.05}) {
            const auto h = cube_in_sphere(antipodal_config(2, d), 1);
            CHECK(h.faces_inside);
            CHECK(h.min_opposite_distance >= prev / 8.0);
            prev = h.min_opposite_distance;
        }
    }
}

TEST_CASE("sphere configs that break the hypotheses are rejected") {
    auto cfg = antipodal_config(2, 0.2);
    cfg.E.push_back(cfg.c0);  // obstacle inside B0
    CHECK_THROWS_AS(cube_in_sphere(cfg, 1), ConfigError);
}
