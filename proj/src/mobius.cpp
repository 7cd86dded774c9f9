#include "qmr/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmr/errors.hpp"

namespace qmr {

namespace {

double entry_gap(const Mobius& x, const Mobius& y, double sign) {
    return std::max({std::abs(x.a - sign * y.a), std::abs(x.b - sign * y.b),
                     std::abs(x.c - sign * y.c), std::abs(x.d - sign * y.d)});
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in group spec");
        }
    }
    return out;
}

Mobius normalized(cplx a, cplx b, cplx c, cplx d) { return Mobius{a, b, c, d}.canonical(); }

}  // namespace

Mobius Mobius::canonical() const {
    const cplx s = std::sqrt(det());
    if (std::abs(s) == 0.0) throw DomainError("singular Moebius matrix");
    Mobius m{a / s, b / s, c / s, d / s};
    const double scale = std::sqrt(m.frobenius2());
    for (const cplx* e : {&m.a, &m.b, &m.c, &m.d}) {
        if (std::abs(*e) <= 1e-12 * scale) continue;
        const bool flip = e->real() < -1e-12 * scale ||
                          (std::abs(e->real()) <= 1e-12 * scale && e->imag() < 0.0);
        if (flip) m = Mobius{-m.a, -m.b, -m.c, -m.d};
        break;
    }
    return m;
}

std::optional<cplx> Mobius::apply(std::optional<cplx> z) const {
    if (!z) {
        if (c == cplx(0.0)) return std::nullopt;
        return a / c;
    }
    const cplx den = c * *z + d;
    if (den == cplx(0.0)) return std::nullopt;
    return (a * *z + b) / den;
}

bool Mobius::is_identity(double tol) const { return matrix_distance(*this, Mobius::identity()) <= tol; }

Mobius operator*(const Mobius& x, const Mobius& y) {
    return Mobius{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
                  x.c * y.b + x.d * y.d};
}

double matrix_distance(const Mobius& x, const Mobius& y) {
    return std::min(entry_gap(x, y, 1.0), entry_gap(x, y, -1.0));
}

UpperPoint act(const Mobius& g, const UpperPoint& p) {
    const cplx cxd = g.c * p.x + g.d;
    const double den = std::norm(cxd) + std::norm(g.c) * p.t * p.t;
    UpperPoint q;
    q.x = ((g.a * p.x + g.b) * std::conj(cxd) + g.a * std::conj(g.c) * p.t * p.t) / den;
    q.t = p.t / den;
    return q;
}

double h3_distance(const UpperPoint& p, const UpperPoint& q) {
    const double num = std::norm(p.x - q.x) + (p.t - q.t) * (p.t - q.t);
    // acosh(1 + u) written to stay accurate for small u.
    const double u = num / (2.0 * p.t * q.t);
    return std::log1p(u + std::sqrt(u * (u + 2.0)));
}

std::array<double, 3> ball_coordinates(const UpperPoint& p) {
    const double s = std::norm(p.x);
    const double den = s + (1.0 + p.t) * (1.0 + p.t);
    return {2.0 * p.x.real() / den, 2.0 * p.x.imag() / den, (s + p.t * p.t - 1.0) / den};
}

double h2_distance(cplx z, cplx w) {
    // asinh form; the atanh of |z - w| / |1 - conj(z) w| loses digits near the boundary.
    auto gap = [](cplx u) { const double a = std::abs(u); return (1.0 - a) * (1.0 + a); };
    return 2.0 * std::asinh(std::abs(z - w) / std::sqrt(gap(z) * gap(w)));
}

Mobius disk_translation_to(cplx p) {
    const double r2 = std::norm(p);
    if (!(r2 < 1.0)) throw DomainError("point outside the open disk");
    const double s = 1.0 / std::sqrt(1.0 - r2);
    return Mobius{cplx(s), p * s, std::conj(p) * s, cplx(s)};
}

Mobius disk_translation(double ell, double theta) {
    const Mobius axis{cplx(std::cosh(ell / 2)), cplx(std::sinh(ell / 2)), cplx(std::sinh(ell / 2)),
                      cplx(std::cosh(ell / 2))};
    return (disk_rotation(theta) * axis * disk_rotation(-theta)).canonical();
}

Mobius disk_rotation(double theta) {
    return Mobius{std::polar(1.0, theta / 2), cplx(0.0), cplx(0.0), std::polar(1.0, -theta / 2)};
}

Mobius from_upper_half_plane(const Mobius& m, cplx p) {
    if (!(p.imag() > 0.0)) throw DomainError("Cayley base point must lie in the upper half-plane");
    const Mobius C{cplx(1.0), -p, cplx(1.0), -std::conj(p)};
    const Mobius Cinv{-std::conj(p), p, cplx(-1.0), cplx(1.0)};  // adjugate
    return (C * m * Cinv).canonical();
}

double riemann_chordal(std::optional<cplx> z, std::optional<cplx> w) {
    if (!z && !w) return 0.0;
    if (!z) return 2.0 / std::sqrt(1.0 + std::norm(*w));
    if (!w) return 2.0 / std::sqrt(1.0 + std::norm(*z));
    return 2.0 * std::abs(*z - *w) / std::sqrt((1.0 + std::norm(*z)) * (1.0 + std::norm(*w)));
}

void validate_model(GroupActionModel& model) {
    if (model.generators.empty()) throw ConfigError("group has no generators");
    for (auto& g : model.generators) {
        if (std::abs(g.det() - cplx(1.0)) > 1e-12) g = g.canonical();
        if (std::abs(g.det() - cplx(1.0)) > 1e-12) throw ConfigError("generator determinant is not 1");
        if (g.is_identity()) throw ConfigError("identity in the generator list");
        if (model.kind == ModelKind::h2_disk) {
            const double off = std::max(std::abs(g.c - std::conj(g.b)), std::abs(g.d - std::conj(g.a)));
            const double off_neg = std::max(std::abs(g.c + std::conj(g.b)), std::abs(g.d + std::conj(g.a)));
            if (std::min(off, off_neg) > 1e-9 * std::sqrt(g.frobenius2()))
                throw ConfigError("H^2 generator does not preserve the unit disk");
        }
    }
    model.inverse_of.assign(model.generators.size(), model.generators.size());
    for (std::size_t i = 0; i < model.generators.size(); ++i) {
        const Mobius inv = model.generators[i].inverse();
        for (std::size_t j = 0; j < model.generators.size(); ++j)
            if (matrix_distance(inv, model.generators[j]) <= 1e-9 * std::sqrt(inv.frobenius2())) {
                model.inverse_of[i] = j;
                break;
            }
        if (model.inverse_of[i] == model.generators.size())
            throw ConfigError("generator list is not closed under inverses");
    }
    if (model.kind == ModelKind::h2_disk && !(std::abs(model.base_disk) < 1.0))
        throw ConfigError("base point outside the open disk");
    if (model.kind == ModelKind::h3_upper && !(model.base_upper.t > 0.0))
        throw ConfigError("base point outside upper half-space");
}

double base_displacement(const GroupActionModel& model, const Mobius& g) {
    if (model.kind == ModelKind::h2_disk) {
        Mobius h = g;
        if (model.base_disk != cplx(0.0)) {
            const Mobius T = disk_translation_to(model.base_disk);
            h = T.inverse() * g * T;
        }
        const double s = std::abs(h.b) / std::sqrt(std::abs(h.det()));
        return 2.0 * std::asinh(s);
    }
    Mobius h = g;
    const auto& p = model.base_upper;
    if (p.x != cplx(0.0) || p.t != 1.0) {
        const double r = std::sqrt(p.t);
        const Mobius T{cplx(r), p.x / r, cplx(0.0), cplx(1.0 / r)};
        h = T.inverse() * g * T;
    }
    const double f = h.frobenius2() / std::abs(h.det());
    // 2 cosh d = |h|_F^2.
    const double u = std::max(0.0, f / 2.0 - 1.0);
    return std::log1p(u + std::sqrt(u * (u + 2.0)));
}

GroupActionModel with_base(const GroupActionModel& model, cplx base_disk) {
    GroupActionModel m = model;
    m.base_disk = base_disk;
    m.dirichlet = false;
    validate_model(m);
    return m;
}

GroupActionModel with_base(const GroupActionModel& model, UpperPoint base) {
    GroupActionModel m = model;
    m.base_upper = base;
    m.dirichlet = false;
    validate_model(m);
    return m;
}

GroupActionModel psl2z_model() {
    const cplx p(0.0, 2.0);
    const Mobius S{cplx(0.0), cplx(-1.0), cplx(1.0), cplx(0.0)};
    const Mobius T{cplx(1.0), cplx(1.0), cplx(0.0), cplx(1.0)};
    GroupActionModel m;
    m.name = "psl2z";
    m.kind = ModelKind::h2_disk;
    m.generators = {from_upper_half_plane(S, p), from_upper_half_plane(T, p),
                    from_upper_half_plane(T.inverse(), p)};
    m.dirichlet = true;
    validate_model(m);
    return m;
}

GroupActionModel cyclic_model(double ell) {
    if (!(ell > 0.0)) throw ConfigError("translation length must be positive");
    GroupActionModel m;
    m.name = "cyclic:" + std::to_string(ell);
    const Mobius g = disk_translation(ell, 0.0);
    m.generators = {g, g.inverse().canonical()};
    m.dirichlet = true;
    validate_model(m);
    return m;
}

GroupActionModel schottky_model(double s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("schottky parameter must lie in (0, 1)");
    const double beta = s * std::numbers::pi / 4.0;
    const double x0 = (1.0 - std::sin(beta)) / std::cos(beta);
    const double tau = 4.0 * std::atanh(x0);
    GroupActionModel m;
    m.name = "schottky:" + std::to_string(s);
    const Mobius a = disk_translation(tau, 0.0);
    const Mobius b = disk_translation(tau, std::numbers::pi / 2);
    m.generators = {a, b, a.inverse().canonical(), b.inverse().canonical()};
    for (int k = 0; k < 4; ++k)
        m.circles.push_back({std::polar(1.0 / std::cos(beta), k * std::numbers::pi / 2), std::tan(beta)});
    m.dirichlet = true;
    validate_model(m);
    return m;
}

GroupActionModel genus2_model() {
    const double pi = std::numbers::pi;
    const double ell = 2.0 * std::acosh(1.0 / std::tan(pi / 8));
    GroupActionModel m;
    m.name = "genus2";
    for (int k = 0; k < 4; ++k) m.generators.push_back(disk_translation(ell, k * pi / 4));
    for (int k = 0; k < 4; ++k) m.generators.push_back(m.generators[k].inverse().canonical());
    m.dirichlet = true;
    validate_model(m);
    return m;
}

GroupActionModel schottky_from_circles(const std::vector<std::pair<Circle, Circle>>& pairs,
                                       cplx upper_base) {
    if (pairs.empty()) throw ConfigError("schottky group needs at least one circle pair");
    std::vector<Circle> all;
    for (const auto& [c1, c2] : pairs) {
        all.push_back(c1);
        all.push_back(c2);
    }
    for (const auto& c : all) {
        if (std::abs(c.centre.imag()) > 1e-12 || !(c.radius > 0.0))
            throw ConfigError("upper half-plane isometric circles need real centres and positive radii");
        if (std::abs(upper_base - c.centre) <= c.radius)
            throw ConfigError("base point lies inside an isometric circle");
    }
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (std::abs(all[i].centre - all[j].centre) <= all[i].radius + all[j].radius)
                throw ConfigError("isometric circles " + std::to_string(i) + " and " +
                                  std::to_string(j) + " are not disjoint");
    GroupActionModel m;
    m.name = "schottky-circles";
    std::vector<Mobius> forward;
    for (const auto& [c1, c2] : pairs) {
        const double x1 = c1.centre.real(), x2 = c2.centre.real();
        // z -> x2 - r1 r2 / (z - x1): exterior of the first circle onto the interior of the second.
        const Mobius g = normalized(cplx(x2), cplx(-c1.radius * c2.radius - x1 * x2), cplx(1.0), cplx(-x1));
        forward.push_back(from_upper_half_plane(g, upper_base));
    }
    for (const auto& g : forward) m.generators.push_back(g);
    for (const auto& g : forward) m.generators.push_back(g.inverse().canonical());
    m.circles = all;
    validate_model(m);
    return m;
}

GroupActionModel picard_model() {
    GroupActionModel m;
    m.name = "picard";
    m.kind = ModelKind::h3_upper;
    const Mobius A{cplx(1.0), cplx(1.0), cplx(0.0), cplx(1.0)};
    const Mobius C{cplx(1.0), cplx(0.0, 1.0), cplx(0.0), cplx(1.0)};
    const Mobius B{cplx(0.0), cplx(-1.0), cplx(1.0), cplx(0.0)};
    const Mobius D{cplx(0.0, 1.0), cplx(0.0), cplx(0.0), cplx(0.0, -1.0)};
    m.generators = {A.canonical(), A.inverse().canonical(), C.canonical(), C.inverse().canonical(),
                    B.canonical(), D.canonical()};
    m.base_upper = UpperPoint{cplx(0.1, 0.13), 1.3};
    validate_model(m);
    return m;
}

GroupActionModel loxodromic_model(double ell, double twist) {
    if (!(ell > 0.0)) throw ConfigError("translation length must be positive");
    GroupActionModel m;
    m.name = "loxodromic:" + std::to_string(ell);
    m.kind = ModelKind::h3_upper;
    const cplx half = cplx(ell, twist) / 2.0;
    const Mobius g{std::exp(half), cplx(0.0), cplx(0.0), std::exp(-half)};
    m.generators = {g.canonical(), g.inverse().canonical()};
    m.dirichlet = true;
    validate_model(m);
    return m;
}

GroupActionModel model_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto args = tail.empty() ? std::vector<double>{} : parse_numbers(tail);
    if (head == "psl2z") return psl2z_model();
    if (head == "genus2") return genus2_model();
    if (head == "picard") return picard_model();
    if (head == "cyclic") return cyclic_model(args.empty() ? 1.0 : args[0]);
    if (head == "schottky") return schottky_model(args.empty() ? 0.9 : args[0]);
    if (head == "loxodromic")
        return loxodromic_model(args.empty() ? 1.0 : args[0], args.size() > 1 ? args[1] : 0.0);
    if (head == "h2" || head == "h3") {
        // Matrix list: 8 numbers (re, im of a, b, c, d) per generator, ';' between
        // generators. Missing inverses are added.
        GroupActionModel m;
        m.name = spec;
        m.kind = head == "h2" ? ModelKind::h2_disk : ModelKind::h3_upper;
        std::stringstream ss(tail);
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto v = parse_numbers(item);
            if (v.size() != 8) throw ConfigError("each matrix needs 8 numbers, got " + std::to_string(v.size()));
            m.generators.push_back(Mobius{cplx(v[0], v[1]), cplx(v[2], v[3]), cplx(v[4], v[5]), cplx(v[6], v[7])}.canonical());
        }
        const std::size_t given = m.generators.size();
        for (std::size_t i = 0; i < given; ++i) {
            const Mobius inv = m.generators[i].inverse().canonical();
            bool have = false;
            for (const auto& g : m.generators) have = have || matrix_distance(inv, g) <= 1e-9 * std::sqrt(inv.frobenius2());
            if (!have) m.generators.push_back(inv);
        }
        validate_model(m);
        return m;
    }
    throw ConfigError("unknown group spec '" + spec +
                      "' (known: psl2z, genus2, picard, cyclic:<ell>, schottky:<s>, loxodromic:<ell>[,<twist>], "
                      "h2:<a,b,c,d as re,im pairs>;..., h3:...)");
}

}  // namespace qmr
