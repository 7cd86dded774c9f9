#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/hyperbolic.hpp"
#include "qmr/mobius.hpp"

using namespace qmr;

namespace {

// Star with centre 0 and leaves 1..k at the given edge lengths.
FiniteMetricSpace star(const std::vector<double>& edges) {
    const std::size_t n = edges.size() + 1;
    std::vector<double> d(n * n, 0.0);
    auto len = [&](std::size_t i) { return i == 0 ? 0.0 : edges[i - 1]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) d[i * n + j] = len(i) + len(j);
    return FiniteMetricSpace(n, d, "star");
}

}  // namespace

TEST_CASE("Gromov product basics") {
    const auto X = euclidean_cloud(40, 2, 1);
    const auto G = gromov_products(X, 3);
    for (Index y = 0; y < X.size(); ++y) CHECK(G(3, y) == doctest::Approx(0.0).epsilon(1e-12));
    for (Index x = 0; x < X.size(); ++x) {
        CHECK(G(x, x) == doctest::Approx(X(x, 3)));
        for (Index y = 0; y < X.size(); ++y) {
            CHECK(G(x, y) == G(y, x));
            CHECK(G(x, y) >= -1e-12);
            CHECK(G(x, y) <= std::min(X(x, 3), X(y, 3)) + 1e-12);
        }
    }
}

TEST_CASE("on a star, (x|y)_p is the distance from p to the geodesic [x, y]") {
    const auto S = star({1.0, 2.0, 0.5, 3.0, 1.5});
    const Index p = 1;  // a leaf
    const auto G = gromov_products(S, p);
    for (Index x = 1; x < S.size(); ++x)
        for (Index y = 1; y < S.size(); ++y) {
            // Geodesic between distinct leaves passes through the centre 0.
            const double expect = x == y ? S(x, p) : (x == p || y == p ? 0.0 : S(p, 0));
            CHECK(G(x, y) == doctest::Approx(expect));
        }
}

TEST_CASE("trees have delta exactly 0") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto T = tree_metric(30 + 20 * s, s);
        CHECK(four_point_delta(gromov_products(T, 0)).delta == 0.0);
        CHECK(oracle::delta_at(T, 0) == 0.0);
    }
}

TEST_CASE("four-point delta agrees with the sum-form oracle") {
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto X = euclidean_cloud(35, 2, 50 + s);
        for (Index p : {0u, 7u}) CHECK(four_point_delta(gromov_products(X, p)).delta == doctest::Approx(oracle::delta_at(X, p)));
        const auto H = disk_cloud(35, 4.0, 90 + s);
        CHECK(four_point_delta(gromov_products(H, 0)).delta == doctest::Approx(oracle::delta_at(H, 0)));
    }
}

TEST_CASE("three points: delta is the max over orderings") {
    const auto X = FiniteMetricSpace::euclidean({{0, 0}, {3, 0}, {0, 4}});
    CHECK(four_point_delta(gromov_products(X, 0)).delta == doctest::Approx(oracle::delta_at(X, 0)));
}

TEST_CASE("H^2 samples: delta below log 2 and stable across seeds") {
    std::vector<double> ds;
    for (std::uint64_t s = 0; s < 5; ++s) ds.push_back(four_point_delta(gromov_products(disk_cloud(200, 6.0, s), 0)).delta);
    double mean = 0;
    for (double d : ds) mean += d / ds.size();
    for (double d : ds) {
        CHECK(d <= std::log(2.0) + 1e-9);
        CHECK(std::abs(d - mean) <= 0.2 * mean);
    }
}

TEST_CASE("delta sampling above the exhaustive limit is seeded") {
    const auto H = disk_cloud(120, 5.0, 4);
    const auto G = gromov_products(H, 0);
    const auto a = four_point_delta(G, 9, 50, 200'000), b = four_point_delta(G, 9, 50, 200'000);
    CHECK_FALSE(a.exhaustive);
    CHECK(a.delta == b.delta);
    CHECK(a.delta <= four_point_delta(G).delta);
}

TEST_CASE("AC_u checks") {
    SUBCASE("tree: c small and stable") {
        for (std::uint64_t s = 0; s < 3; ++s) {
            const auto r = acu_check(gromov_products(tree_metric(150, s), 0), -1.0, 40, s);
            CHECK(r.c <= 1e-9);
            CHECK_FALSE(r.violation);
        }
    }
    SUBCASE("H^2 at kappa = -1 is not flagged") {
        const auto r = acu_check(gromov_products(disk_cloud(200, 6.0, 1), 0), -1.0, 40, 1);
        CHECK_FALSE(r.violation);
        REQUIRE(!r.c_by_length.empty());
        CHECK(r.c_by_length[0] >= -1e-12);  // one-step chains contribute 0
    }
    SUBCASE("a scaled H^2 (boundary parameter above sqrt(-kappa)) is flagged") {
        const auto r = acu_check(gromov_products(disk_cloud(200, 6.0, 1).scaled(3.0), 0), -1.0, 40, 1);
        CHECK(r.violation);
        CHECK(r.growth_slope > 0.15);
    }
}

TEST_CASE("visual metrics") {
    SUBCASE("two points") {
        BoundarySample b;
        b.gromov.n = 2;
        b.gromov.products = {INFINITY, 1.3, 1.3, INFINITY};
        b.labels = {"a", "b"};
        const auto v = visual_metric(b, 0.7);
        CHECK(v.d_eps[1] == doctest::Approx(std::exp(-0.7 * 1.3)));
        CHECK(v.rho[1] == doctest::Approx(v.d_eps[1]));
    }
    SUBCASE("ultrametric tree boundary: d_eps = rho for every eps") {
        const auto b = tree_boundary(3, 4);
        for (double eps : {0.2, 0.5, 1.0, 2.0}) {
            const auto v = visual_metric(b, eps);
            for (std::size_t i = 0; i < v.rho.size(); ++i) CHECK(v.d_eps[i] == v.rho[i]);
            CHECK(v.K == doctest::Approx(1.0));
        }
    }
    SUBCASE("Schottky sweep: rho/4 <= d_eps <= rho wherever K <= sqrt 2") {
        const auto m = schottky_model(0.7);
        const auto ls = limit_set_sample(m, 4, 3);
        std::vector<Vec> pts;
        for (std::size_t i = 0; i < ls.points.size(); i += std::max<std::size_t>(1, ls.points.size() / 120)) pts.push_back(ls.points[i]);
        const auto b = analytic_boundary_sample(m, pts);
        bool saw_applicable = false, saw_not = false;
        for (double eps : {0.25, 0.5, 0.75, 1.0, 1.5}) {
            const auto v = visual_metric(b, eps);
            CHECK(v.upper_holds);
            if (v.applicable) {
                CHECK(v.lower_holds);
                CHECK(v.min_ratio >= 0.25 - 1e-12);
                saw_applicable = true;
            } else {
                saw_not = true;
            }
            CHECK(v.K <= std::pow(2.0, eps) + 1e-6);
        }
        CHECK(saw_applicable);
        CHECK(saw_not);
    }
    SUBCASE("bad boundary tables are rejected") {
        BoundarySample b;
        b.gromov.n = 2;
        b.gromov.products = {INFINITY, 1.0, 2.0, INFINITY};
        CHECK_THROWS_AS(validate_boundary(b), ValidationError);
    }
}

TEST_CASE("quasi-metric constant of an ultrametric is 1") {
    const auto b = tree_boundary(2, 5);
    const auto v = visual_metric(b, 1.0);
    CHECK(quasi_metric_constant(b.size(), v.rho) == doctest::Approx(1.0));
}

TEST_CASE("convergence at infinity along orbit rays") {
    const double ell = 1.0;
    std::vector<cplx> pts{cplx(0.0)};
    for (int n = 1; n <= 12; ++n) pts.push_back(std::tanh(n * ell / 2));   // ray to +1
    for (int n = 1; n <= 12; ++n) pts.push_back(-std::tanh(n * ell / 2));  // ray to -1
    for (int n = 1; n <= 12; ++n) pts.push_back(std::tanh((n + 0.5) * ell / 2));  // shifted ray to +1
    pts.push_back(cplx(0.3, 0.2));  // one point, repeated as a constant sequence
    const auto H = disk_space(pts, "rays");
    const auto G = gromov_products(H, 0);
    std::vector<Index> plus, minus, shifted, constant;
    for (Index i = 1; i <= 12; ++i) plus.push_back(i);
    for (Index i = 13; i <= 24; ++i) minus.push_back(i);
    for (Index i = 25; i <= 36; ++i) shifted.push_back(i);
    constant.assign(6, 37);

    const auto same = convergence_at_infinity(G, plus, shifted, 4);
    CHECK(same.a_converges);
    CHECK(same.b_converges);
    CHECK(same.equivalent);
    const auto opposite = convergence_at_infinity(G, plus, minus, 4);
    CHECK(opposite.b_converges);
    CHECK_FALSE(opposite.equivalent);
    const auto flat = convergence_at_infinity(G, constant, plus, 2);
    CHECK_FALSE(flat.a_converges);
}
