#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmr/elevator.hpp"
#include "qmr/errors.hpp"
#include "qmr/generators.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/mobius.hpp"
#include "qmr/rng.hpp"

using namespace qmr;

namespace {

std::vector<Vec> circle_points(std::size_t n, double phase = 0.1) {
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = phase + 2 * std::numbers::pi * i / n;
        pts.push_back({std::cos(t), std::sin(t)});
    }
    return pts;
}

}  // namespace

TEST_CASE("PSL(2,Z) orbit counts match integer enumeration") {
    const auto orbit = orbit_ball(psl2z_model(), 9.0);
    CHECK_FALSE(orbit.truncated);
    for (double r : {2.0, 4.0, 6.5, 9.0}) {
        CAPTURE(r);
        CHECK(orbit.count(r) == oracle::psl2z_count(r));
    }
}

TEST_CASE("cyclic orbit counts") {
    for (double ell : {0.7, 1.0, 2.3}) {
        const auto orbit = orbit_ball(cyclic_model(ell), 20.0);
        // Radii stay off the ties r = n ell.
        for (double r : {1.5, 5.3, 19.9}) CHECK(orbit.count(r) == oracle::cyclic_count(r, ell));
    }
}

TEST_CASE("entropy of PSL(2,Z) is near 1, cyclic near 0") {
    const auto e = entropy(orbit_ball(psl2z_model(), 12.0), 6.0, 12.0);
    CHECK(e.slope == doctest::Approx(1.0).epsilon(0.15));
    const auto c = entropy(orbit_ball(cyclic_model(1.0), 60.0), 30.0, 60.0);
    CHECK(c.slope < 0.15);
    CHECK(c.slope >= 0.0);
    CHECK_THROWS_AS(entropy(orbit_ball(cyclic_model(1.0), 10.0), 5.0, 20.0), ResolutionError);
}

TEST_CASE("models with an identity generator are rejected") {
    GroupActionModel m;
    m.generators = {Mobius::identity()};
    m.inverse_of = {0};
    CHECK_THROWS_AS(validate_model(m), ConfigError);
    CHECK_THROWS_AS(model_from_spec("h2:1,0,0,0,0,0,1,0"), ConfigError);
}

TEST_CASE("matrix-list group specs") {
    // Translation of length 1 along the real diameter, written out by hand.
    const double c = std::cosh(0.5), s = std::sinh(0.5);
    const auto m = model_from_spec("h2:" + std::to_string(c) + ",0," + std::to_string(s) + ",0," +
                                   std::to_string(s) + ",0," + std::to_string(c) + ",0");
    CHECK(m.generators.size() == 2);  // inverse added
    CHECK(base_displacement(m, m.generators[0]) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(model_from_spec("nonsense"));
}

TEST_CASE("boundary action preserves cross-ratios") {
    const auto m = psl2z_model();
    const auto pts = circle_points(40);
    SUBCASE("identity") {
        const auto r = boundary_action(m, Mobius::identity(), pts, 5000, 1);
        CHECK(r.C == doctest::Approx(1.0));
        CHECK(r.max_deviation <= 1e-12);
    }
    SUBCASE("random words up to length 10") {
        Rng rng(3);
        for (std::size_t len = 1; len <= 10; ++len) {
            const auto g = random_word(m, len, rng);
            const auto r = boundary_action(m, g, pts, 5000, len);
            CHECK(r.max_deviation <= 1e-9);
        }
    }
    SUBCASE("a snowflaked metric is not preserved") {
        const auto X = boundary_space(pts);
        const auto S = snowflake(X, 0.5);
        std::vector<Index> id(pts.size());
        for (Index i = 0; i < id.size(); ++i) id[i] = i;
        CHECK(qm_distortion(X, S, id, 20000, 2).linear_constant_C > 1.0 + 1e-3);
    }
}

TEST_CASE("limit sets") {
    SUBCASE("cyclic: two points") {
        const auto ls = limit_set_sample(cyclic_model(1.0), 6, 1);
        const auto X = boundary_space(ls.points);
        // Every sampled point sits at one of the two fixed points +-1.
        for (const auto& p : ls.points) CHECK(std::min(chordal(p, {1.0, 0.0}), chordal(p, {-1.0, 0.0})) <= 1e-6);
        CHECK(X.diam() == doctest::Approx(2.0));
    }
    SUBCASE("genus 2: the whole circle, counts grow like 1/r") {
        std::vector<double> radii{0.2, 0.1, 0.05};
        const auto fit = limit_set_dimension(genus2_model(), 4, radii, 2);
        REQUIRE(fit.resolved_count >= 2);
        CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.15));
    }
    SUBCASE("Schottky: dimension below 1") {
        std::vector<double> radii;
        for (int i = 0; i <= 6; ++i) radii.push_back(std::pow(2.0, -2.0 - 0.5 * i));
        const auto fit = limit_set_dimension(schottky_model(0.5), 8, radii, 3);
        REQUIRE(fit.resolved_count >= 3);
        CHECK(fit.slope > 0.1);
        CHECK(fit.slope < 0.95);
    }
}

TEST_CASE("triples can be pulled apart") {
    const auto m = genus2_model();
    const std::array<Vec, 3> triple{Vec{1.0, 0.0}, Vec{std::cos(0.02), std::sin(0.02)}, Vec{std::cos(0.05), std::sin(0.05)}};
    const auto t = separate_triple(m, triple, 4);
    CHECK(t.achieved > t.input_min);
    CHECK(t.achieved > 0.3);
    CHECK_THROWS_AS(separate_triple(m, {triple[0], triple[0], triple[1]}, 3), ParameterError);
}

TEST_CASE("elevator at r = diam needs no work") {
    const auto m = genus2_model();
    const Vec p{1.0, 0.0};
    const auto sample = elevator_sample(p, 2.0, 2.0, 200, 4);
    const auto cert = conformal_elevator(m, sample, 0, 2.0, 2.0);
    CHECK(cert.C_i >= 1.0);
    CHECK(std::isfinite(cert.C_i));
    CHECK(std::isfinite(cert.C_ii));
    CHECK(cert.far_empty);  // nothing lies beyond L r
}

TEST_CASE("rough isometry defect") {
    const auto X = euclidean_cloud(30, 2, 6);
    CHECK(rough_isometry_defect(X, X).lambda == doctest::Approx(1.0));
    CHECK(rough_isometry_defect(X, X).k == doctest::Approx(0.0));
    const auto r = rough_isometry_defect(X, X.scaled(2.0));
    CHECK(r.lambda == doctest::Approx(2.0));
    CHECK(r.k == doctest::Approx(0.0).epsilon(1e-12));

    SUBCASE("cyclic orbit map is a scaled isometry of the word metric") {
        const double ell = 0.8;
        const auto g = disk_translation(ell);
        std::vector<cplx> pts;
        std::vector<std::vector<double>> words;
        Mobius h = Mobius::identity();
        for (int n = 0; n < 12; ++n) {
            pts.push_back(*h.apply(cplx(0.0)));
            words.push_back({double(n)});
            h = g * h;
        }
        const auto d = rough_isometry_defect(FiniteMetricSpace::euclidean(words), disk_space(pts));
        CHECK(d.lambda == doctest::Approx(1.0 / ell));
        CHECK(d.k <= 1e-6);
    }
}

TEST_CASE("Koch net counts follow the box-count oracle") {
    const auto K = koch_curve(5);
    std::vector<double> radii;
    for (int q = 4; q <= 16; ++q) radii.push_back(std::pow(3.0, -0.25 * q - 0.01));
    const auto fit = net_count_dimension(K, radii);
    std::vector<double> lx, ly;
    for (double r : radii) {
        lx.push_back(-std::log(r));
        ly.push_back(std::log(double(oracle::koch_box_count(5, r))));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    const double box_slope = sxy / sxx;
    CHECK(fit.slope == doctest::Approx(box_slope).epsilon(0.1));
    CHECK(std::abs(fit.slope - std::log(4.0) / std::log(3.0)) <= 0.15);
}
