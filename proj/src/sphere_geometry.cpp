#include "qmr/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmr/errors.hpp"
#include "qmr/rng.hpp"

namespace qmr {

namespace {

Vec north(int n) {
    Vec v(n + 1, 0.0);
    v[n] = 1.0;
    return v;
}

Vec random_unit(Rng& rng, std::size_t dim) {
    Vec v(dim);
    double s = 0.0;
    while (s < 1e-20) {
        s = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            s += x * x;
        }
    }
    s = std::sqrt(s);
    for (auto& x : v) x /= s;
    return v;
}

// Regular grid of g points per free axis on the face {u_axis = side}.
std::vector<Vec> face_points(int n, int axis, double side, std::size_t target, Rng& rng) {
    const int free_axes = n - 1;
    int g = 1;
    if (free_axes > 0) {
        g = std::max(2, static_cast<int>(std::round(std::pow(static_cast<double>(target),
                                                             1.0 / free_axes))));
    }
    std::size_t total = 1;
    for (int k = 0; k < free_axes; ++k) total *= g;
    std::vector<Vec> out;
    for (std::size_t t = 0; t < total; ++t) {
        Vec u(n, 0.0);
        std::size_t rest = t;
        for (int k = 0; k < n; ++k) {
            if (k == axis) {
                u[k] = side;
                continue;
            }
            u[k] = static_cast<double>(rest % g) / (g - 1);
            rest /= g;
        }
        out.push_back(u);
    }
    // A few random points on top of the lattice.
    for (std::size_t t = 0; t < target / 4 && free_axes > 0; ++t) {
        Vec u(n);
        for (int k = 0; k < n; ++k) u[k] = k == axis ? side : rng.uniform();
        out.push_back(u);
    }
    return out;
}

}  // namespace

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double chordal(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Vec stereographic(const Vec& x) {
    if (x.size() < 2) throw ShapeError("stereographic input needs at least 2 coordinates");
    const std::size_t n = x.size() - 1;
    const double gap = 1.0 - x[n];
    if (gap < 1e-12) {
        std::ostringstream os;
        os << "point at chordal distance " << chordal(x, north(static_cast<int>(n)))
           << " from the projection pole";
        throw DomainError(os.str());
    }
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / gap;
    return y;
}

Vec inverse_stereographic(const Vec& y) {
    const double s = dot(y, y);
    Vec x(y.size() + 1);
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = 2.0 * y[i] / (s + 1.0);
    x[y.size()] = (s - 1.0) / (s + 1.0);
    return x;
}

Householder Householder::mapping(const Vec& a, const Vec& b) {
    Householder h;
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double len = norm(d);
    if (len < 1e-15) return h;
    for (auto& x : d) x /= len;
    h.u = std::move(d);
    return h;
}

Vec Householder::apply(const Vec& x) const {
    if (u.empty()) return x;
    const double t = 2.0 * dot(u, x);
    Vec y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= t * u[i];
    return y;
}

StereoSweep stereo_sweep(int n, double delta, std::size_t pairs, std::uint64_t seed) {
    if (n < 1) throw ParameterError("sphere dimension must be positive");
    if (!(delta > 0.0 && delta < 2.0)) throw ParameterError("cap radius must lie in (0, 2)");
    Rng rng(seed);
    const Vec pole = north(n);
    auto draw = [&] {
        while (true) {
            Vec v = random_unit(rng, n + 1);
            if (chordal(v, pole) >= delta) return v;
        }
    };
    StereoSweep s;
    s.delta = delta;
    s.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < pairs; ++t) {
        const Vec x = draw(), y = draw();
        const double d = chordal(x, y);
        if (d < 1e-12) continue;
        const double r = chordal(stereographic(x), stereographic(y)) / d;
        s.min_ratio = std::min(s.min_ratio, r);
        s.max_ratio = std::max(s.max_ratio, r);
        ++s.pairs;
    }
    s.c2 = s.max_ratio * delta * delta;
    return s;
}

void validate_config(const SphereConfig& c) {
    if (c.n < 1) throw ConfigError("sphere dimension must be positive");
    if (!(c.delta > 0.0)) throw ConfigError("delta must be positive");
    if (c.E.empty()) throw ConfigError("obstacle set E is empty");
    auto on_sphere = [&](const Vec& v, const char* what) {
        if (v.size() != static_cast<std::size_t>(c.n + 1) || std::abs(norm(v) - 1.0) > 1e-9)
            throw ConfigError(std::string(what) + " is not a point of the unit sphere");
    };
    on_sphere(c.c0, "centre of B0");
    on_sphere(c.c1, "centre of B1");
    for (const auto& e : c.E) on_sphere(e, "point of E");
    double diam = 0.0;
    for (const auto& a : c.E)
        for (const auto& b : c.E) diam = std::max(diam, chordal(a, b));
    if (!(diam < c.delta)) throw ConfigError("diam(E) must be below delta");
    if (chordal(c.c0, c.c1) < 3.0 * c.delta) throw ConfigError("dist(B0, B1) below delta");
    for (const auto& e : c.E) {
        if (chordal(c.c0, e) < 2.0 * c.delta || chordal(c.c1, e) < 2.0 * c.delta)
            throw ConfigError("a ball comes within delta of E");
    }
}

Vec SphereCube::operator()(const Vec& u) const {
    if (u.size() != static_cast<std::size_t>(n)) throw ShapeError("cube parameter has wrong dimension");
    const Vec a = to_axis.apply(q0);
    const Vec b = to_axis.apply(q1);
    Vec z(n);
    z[0] = a[0] + u[0] * (b[0] - a[0]);
    for (int k = 1; k < n; ++k) z[k] = a[k] + (2.0 * u[k] - 1.0) * half_width;
    return to_pole.apply(inverse_stereographic(to_axis.apply(z)));
}

SphereCube cube_in_sphere(const SphereConfig& config, std::uint64_t seed,
                          std::size_t samples_per_face) {
    validate_config(config);
    const int n = config.n;
    SphereCube s;
    s.config = config;
    s.n = n;
    s.samples_per_face = samples_per_face;
    const Vec pole = north(n);
    s.to_pole = Householder::mapping(config.E[0], pole);

    const double h = 1.0 - config.delta * config.delta / 2.0;
    auto cap_image = [&](const Vec& centre, Vec& q, double& rho) {
        const Vec a = s.to_pole.apply(centre);
        const double A = h - a[n];
        Vec ap(a.begin(), a.end() - 1);
        q = ap;
        for (auto& x : q) x /= A;
        rho = std::sqrt(std::max(0.0, dot(ap, ap) / (A * A) - (h + a[n]) / A));
    };
    cap_image(config.c0, s.q0, s.rho0);
    cap_image(config.c1, s.q1, s.rho1);
    s.cap_radius = std::sqrt((1.0 + h) / (1.0 - h));

    Vec dir(n);
    for (int k = 0; k < n; ++k) dir[k] = s.q1[k] - s.q0[k];
    const double len = norm(dir);
    if (len < 1e-12) throw ConfigError("projected balls coincide");
    for (auto& x : dir) x /= len;
    Vec e1(n, 0.0);
    e1[0] = 1.0;
    s.to_axis = Householder::mapping(dir, e1);
    s.half_width = std::min(s.rho0, s.rho1) / (2.0 * std::sqrt(std::max(1.0, n - 1.0)));

    Rng rng(seed);
    const double tol = 1e-9;
    s.min_opposite_distance = std::numeric_limits<double>::infinity();
    std::vector<Vec> all;
    for (int axis = 0; axis < n; ++axis) {
        std::vector<Vec> side0, side1;
        for (const auto& u : face_points(n, axis, 0.0, samples_per_face, rng)) side0.push_back(s(u));
        for (const auto& u : face_points(n, axis, 1.0, samples_per_face, rng)) side1.push_back(s(u));
        for (const auto& x : side0)
            for (const auto& y : side1)
                s.min_opposite_distance = std::min(s.min_opposite_distance, chordal(x, y));
        if (axis == 0) {
            for (const auto& x : side0)
                if (chordal(x, config.c0) > config.delta * (1 + tol)) s.faces_inside = false;
            for (const auto& x : side1)
                if (chordal(x, config.c1) > config.delta * (1 + tol)) s.faces_inside = false;
        }
        all.insert(all.end(), side0.begin(), side0.end());
        all.insert(all.end(), side1.begin(), side1.end());
    }
    for (std::size_t t = 0; t < samples_per_face * 4; ++t) {
        Vec u(n);
        for (auto& x : u) x = rng.uniform();
        all.push_back(s(u));
    }
    for (const auto& x : all) {
        if (chordal(x, config.E[0]) < config.delta * (1 - tol)) s.avoids_cap = false;
        for (const auto& e : config.E)
            if (chordal(x, e) <= 0.0) s.avoids_E = false;
    }
    s.fitted_c = s.min_opposite_distance / std::pow(config.delta, 3);
    return s;
}

SphereConfig antipodal_config(int n, double delta) {
    SphereConfig c;
    c.n = n;
    c.delta = delta;
    c.c0.assign(n + 1, 0.0);
    c.c1.assign(n + 1, 0.0);
    c.c0[0] = 1.0;
    c.c1[0] = -1.0;
    c.E.push_back(north(n));
    return c;
}

}  // namespace qmr
