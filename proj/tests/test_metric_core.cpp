#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/metric_core.hpp"
#include "qmr/rng.hpp"

using namespace qmr;

namespace {

FiniteMetricSpace line(std::vector<double> xs) {
    std::vector<std::vector<double>> pts;
    for (double x : xs) pts.push_back({x});
    return FiniteMetricSpace::euclidean(pts);
}

std::vector<Index> identity_map(std::size_t n) {
    std::vector<Index> id(n);
    std::iota(id.begin(), id.end(), 0);
    return id;
}

}  // namespace

TEST_CASE("cross-ratio of four points on a line") {
    const auto X = line({0, 1, 2, 3});
    CHECK(cross_ratio(X, {0, 1, 2, 3}) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("cross-ratio of the unit square corners") {
    const auto X = FiniteMetricSpace::euclidean({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(cross_ratio(X, {0, 1, 2, 3}) == doctest::Approx(2.0));
}

TEST_CASE("swapping the first two points inverts the cross-ratio") {
    const auto X = euclidean_cloud(30, 3, 11);
    for (const auto& q : sample_quadruples(X.size(), 500, 4))
        CHECK(cross_ratio(X, q) * cross_ratio(X, q.swap_first_two()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cross-ratio rejects repeated points") {
    const auto X = line({0, 1, 2, 3});
    CHECK_THROWS(cross_ratio(X, {0, 0, 2, 3}));
}

TEST_CASE("snowflake") {
    SUBCASE("eps = 1 is the identity") {
        const auto X = euclidean_cloud(20, 2, 3);
        CHECK(snowflake(X, 1.0).matrix() == X.matrix());
    }
    SUBCASE("9 -> 3 at eps 1/2") {
        const auto X = line({0, 9});
        CHECK(snowflake(X, 0.5)(0, 1) == doctest::Approx(3.0));
    }
    SUBCASE("cross-ratios pick up the exponent") {
        const auto X = euclidean_cloud(25, 2, 8);
        const auto Y = snowflake(X, 0.4);
        for (const auto& q : sample_quadruples(X.size(), 300, 1))
            CHECK(cross_ratio(Y, q) == doctest::Approx(std::pow(cross_ratio(X, q), 0.4)).epsilon(1e-10));
    }
    SUBCASE("eps outside (0, 1] is rejected") {
        const auto X = line({0, 1});
        CHECK_THROWS_AS(snowflake(X, 0.0), ParameterError);
        CHECK_THROWS_AS(snowflake(X, 1.5), ParameterError);
    }
}

TEST_CASE("metric validation") {
    CHECK_THROWS_AS(FiniteMetricSpace(3, {0, 1, 5, 1, 0, 1, 5, 1, 0}), ValidationError);  // 5 > 1 + 1
    CHECK_THROWS_AS(FiniteMetricSpace(2, {0, 1, 2, 0}), ValidationError);                 // asymmetric
    CHECK_THROWS_AS(FiniteMetricSpace(2, {0, 1, 1}), ShapeError);
}

TEST_CASE("greedy nets") {
    const auto X = line({0, 0.5, 1});
    const std::vector<Index> order{0, 1, 2};
    SUBCASE("sep above the diameter keeps one point") {
        CHECK(max_separated_net(X, 1.5, order).members.size() == 1);
    }
    SUBCASE("{0, 0.5, 1} at 0.6 from index 0") {
        const auto net = max_separated_net(X, 0.6, order);
        CHECK(net.members == std::vector<Index>{0, 2});
        CHECK(verify_net(X, net));
    }
    SUBCASE("sep below the minimum distance keeps everything") {
        CHECK(max_separated_net(X, 0.4, order).members.size() == 3);
    }
}

TEST_CASE("nets are maximal and separated for random seeds") {
    const auto X = euclidean_cloud(300, 2, 5);
    for (std::uint64_t s = 0; s < 5; ++s)
        for (double sep : {0.05, 0.1, 0.3}) {
            const auto net = max_separated_net(X, sep, s);
            CHECK(verify_net(X, net));
            CHECK(net.members == max_separated_net(X, sep, s).members);  // same seed, same net
        }
}

TEST_CASE("strong quasi-Moebius distortion") {
    const auto X = euclidean_cloud(12, 2, 2);
    const auto id = identity_map(X.size());
    SUBCASE("identity") {
        CHECK(qm_distortion(X, X, id, 1'000'000, 0).linear_constant_C == doctest::Approx(1.0));
    }
    SUBCASE("scaling") {
        CHECK(qm_distortion(X, X.scaled(3.7), id, 1'000'000, 0).linear_constant_C == doctest::Approx(1.0));
    }
    SUBCASE("snowflake at 1/2 on a quadruple with cross-ratio 1/4") {
        // d13 = d24 = 1, d14 = d23 = 2, d12 = d34 = 1
        const FiniteMetricSpace Q(4, {0, 1, 1, 2, 1, 0, 2, 1, 1, 2, 0, 1, 2, 1, 1, 0});
        REQUIRE(cross_ratio(Q, {0, 1, 2, 3}) == doctest::Approx(0.25));
        double smallest = 1e9;
        for (Index a = 0; a < 4; ++a)
            for (Index b = 0; b < 4; ++b)
                for (Index c = 0; c < 4; ++c)
                    for (Index d = 0; d < 4; ++d)
                        if (a != b && a != c && a != d && b != c && b != d && c != d)
                            smallest = std::min(smallest, Q(a, c) * Q(b, d) / (Q(a, d) * Q(b, c)));
        const auto D = qm_distortion(Q, snowflake(Q, 0.5), identity_map(4), 1000, 0);
        CHECK(D.exhaustive);
        CHECK(D.linear_constant_C >= 2.0 - 1e-12);
        CHECK(D.linear_constant_C == doctest::Approx(1.0 / std::sqrt(smallest)));
    }
}

TEST_CASE("bilipschitz distortion") {
    // Ultrametric with distance values {1/4, 1, 4}: a, b at 1/4, c at 1 from both, d at 4 from all.
    const FiniteMetricSpace U(4, {0, 0.25, 1, 4, 0.25, 0, 1, 4, 1, 1, 0, 4, 4, 4, 4, 0});
    const auto id = identity_map(U.size());
    CHECK(bilipschitz_distortion(U, U, id) == doctest::Approx(1.0));
    CHECK(bilipschitz_distortion(U, U.scaled(2.0), id) == doctest::Approx(2.0));
    CHECK(bilipschitz_distortion(U, snowflake(U, 0.5), id) == doctest::Approx(2.0));
}

TEST_CASE("Ahlfors regularity fits") {
    const auto C = circle_snowflake(1024, 1.0);
    std::vector<double> radii;
    for (int j = 2; j <= 7; ++j) radii.push_back(std::pow(2.0, -j));
    SUBCASE("circle at alpha = 1") {
        const auto fit = ahlfors_fit(C, 1.0, radii);
        CHECK(fit.constant_C <= 4.0);
        CHECK(fit.consistent);
    }
    SUBCASE("circle at alpha = 2 fails and C grows with the grid") {
        const auto fit = ahlfors_fit(C, 2.0, radii);
        CHECK_FALSE(fit.consistent);
        std::vector<double> more = radii;
        more.push_back(std::pow(2.0, -8));
        CHECK(ahlfors_fit(C, 2.0, more).constant_C > fit.constant_C);
    }
    SUBCASE("snowflaked circle at alpha = 2") {
        const auto S = circle_snowflake(1024, 0.5);
        std::vector<double> r2;
        for (int j = 1; j <= 4; ++j) r2.push_back(std::pow(2.0, -j));
        const auto fit = ahlfors_fit(S, 2.0, r2);
        CHECK(fit.consistent);
        CHECK(fit.constant_C <= 8.0);
    }
}

TEST_CASE("discrete step paths") {
    std::vector<double> xs;
    for (int i = 0; i <= 10; ++i) xs.push_back(0.1 * i);
    const auto X = line(xs);
    CHECK(min_delta_path(X, 0, 1, 0.1 + 1e-12) == 1u);
    CHECK(min_delta_path(X, 0, 10, 0.1 + 1e-12) == 10u);
    CHECK_FALSE(min_delta_path(X, 0, 10, 0.05).has_value());
}

TEST_CASE("step paths in a snowflaked interval need (d/step)^2 steps") {
    std::vector<double> xs;
    for (int i = 0; i <= 400; ++i) xs.push_back(i / 400.0);
    const auto S = snowflake(line(xs), 0.5);
    double c = 1e9;
    for (double step : {0.1, 0.2, 0.3})
        for (Index j : {100u, 250u, 400u}) {
            const auto len = min_delta_path(S, 0, j, step);
            REQUIRE(len.has_value());
            c = std::min(c, *len / std::pow(S(0, j) / step, 2.0));
        }
    CHECK(c > 0.5);
}

TEST_CASE("rng derive is stable and separates tags") {
    CHECK(Rng::derive(42, 1) == Rng::derive(42, 1));
    CHECK(Rng::derive(42, 1) != Rng::derive(42, 2));
}
