#include "qmr/group_actions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "qmr/errors.hpp"

namespace qmr {

namespace {

using Key = std::array<std::int64_t, 3>;

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::uint64_t h = 0x9E3779B97F4A7C15ull;
        for (auto v : k) {
            h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

// Tolerance-aware point set: cells of side `cell`, matches within `tol`
// (tol < cell, so only neighbouring cells need checking).
class PointIndex {
public:
    PointIndex(double cell, double tol) : cell_(cell), tol_(tol) {}

    std::optional<std::uint32_t> find(const std::array<double, 3>& p) const {
        const Key k = key(p);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = head_.find(Key{k[0] + dx, k[1] + dy, k[2] + dz});
                    if (it == head_.end()) continue;
                    for (std::uint32_t i = it->second; i != kEnd; i = next_[i]) {
                        const auto& q = pts_[i];
                        if (std::abs(q[0] - p[0]) <= tol_ && std::abs(q[1] - p[1]) <= tol_ &&
                            std::abs(q[2] - p[2]) <= tol_)
                            return i;
                    }
                }
        return std::nullopt;
    }

    std::uint32_t insert(const std::array<double, 3>& p) {
        const auto id = static_cast<std::uint32_t>(pts_.size());
        pts_.push_back(p);
        auto [it, fresh] = head_.try_emplace(key(p), id);
        next_.push_back(fresh ? kEnd : it->second);
        it->second = id;
        return id;
    }

    std::size_t size() const { return pts_.size(); }

private:
    static constexpr std::uint32_t kEnd = std::numeric_limits<std::uint32_t>::max();

    Key key(const std::array<double, 3>& p) const {
        return {static_cast<std::int64_t>(std::floor(p[0] / cell_)),
                static_cast<std::int64_t>(std::floor(p[1] / cell_)),
                static_cast<std::int64_t>(std::floor(p[2] / cell_))};
    }

    double cell_, tol_;
    std::unordered_map<Key, std::uint32_t, KeyHash> head_;
    std::vector<std::uint32_t> next_;
    std::vector<std::array<double, 3>> pts_;
};

std::array<double, 3> orbit_coordinates(const GroupActionModel& model, const Mobius& g,
                                        cplx base_disk, const UpperPoint& base_upper) {
    if (model.kind == ModelKind::h2_disk) {
        const cplx z = *g.apply(base_disk);
        return {z.real(), z.imag(), 0.0};
    }
    return ball_coordinates(act(g, base_upper));
}

std::array<double, 3> as3(const Vec& v) {
    return {v[0], v.size() > 1 ? v[1] : 0.0, v.size() > 2 ? v[2] : 0.0};
}

void check_unit(const Vec& xi, int dim) {
    if (xi.size() != static_cast<std::size_t>(dim + 1))
        throw ShapeError("boundary point has the wrong dimension");
    if (std::abs(norm(xi) - 1.0) > 1e-12) throw DomainError("boundary point is not a unit vector");
}

bool loxodromic(const GroupActionModel& model, const Mobius& g) {
    const cplx tr = g.trace() / std::sqrt(g.det());
    if (model.kind == ModelKind::h2_disk) return std::abs(tr.real()) > 2.0 + 1e-9;
    const cplx t2 = tr * tr;
    return !(std::abs(t2.imag()) < 1e-9 && t2.real() >= -1e-9 && t2.real() <= 4.0 + 1e-9);
}

double min_pairwise(const std::array<Vec, 3>& t) {
    return std::min({chordal(t[0], t[1]), chordal(t[0], t[2]), chordal(t[1], t[2])});
}

}  // namespace

std::size_t OrbitBall::count(double r) const {
    auto it = std::upper_bound(points.begin(), points.end(), r,
                               [](double v, const OrbitPoint& p) { return v < p.distance; });
    return static_cast<std::size_t>(it - points.begin());
}

OrbitBall orbit_ball(const GroupActionModel& model, double R, const OrbitOptions& options) {
    if (!(R > 0.0)) throw ParameterError("orbit radius must be positive");
    OrbitBall ball;
    ball.group = model.name;
    ball.R = R;
    ball.margin = options.margin >= 0.0 ? options.margin : (model.dirichlet ? 1e-9 : 0.5);
    const double limit = R + ball.margin;

    PointIndex index(1e-10, 1e-12);
    std::vector<OrbitPoint> all;
    std::deque<std::uint32_t> queue;
    OrbitPoint id;
    id.g = Mobius::identity();
    id.ball = orbit_coordinates(model, id.g, model.base_disk, model.base_upper);
    index.insert(id.ball);
    all.push_back(id);
    queue.push_back(0);
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (const auto& s : model.generators) {
            Mobius h = all[u].g * s;
            if (std::abs(h.det() - cplx(1.0)) > 1e-13) h = h.canonical();
            const double dist = base_displacement(model, h);
            if (dist > limit) continue;
            const auto coords = orbit_coordinates(model, h, model.base_disk, model.base_upper);
            if (index.find(coords)) continue;
            if (all[u].word_length + 1 > options.word_length_cap) {
                ball.truncated = true;
                ball.truncation_reason = "word length cap reached";
                continue;
            }
            if (all.size() >= options.max_points) {
                ball.truncated = true;
                ball.truncation_reason = "point cap reached";
                queue.clear();
                break;
            }
            index.insert(coords);
            all.push_back(OrbitPoint{h, dist, coords, all[u].word_length + 1});
            queue.push_back(static_cast<std::uint32_t>(all.size() - 1));
        }
    }
    ball.explored = all.size();
    for (auto& p : all)
        if (p.distance <= R) ball.points.push_back(std::move(p));
    std::stable_sort(ball.points.begin(), ball.points.end(),
                     [](const OrbitPoint& a, const OrbitPoint& b) { return a.distance < b.distance; });
    return ball;
}

EntropyEstimate entropy(const OrbitBall& orbit, double lo, double hi, double step) {
    if (orbit.truncated)
        throw ResolutionError("orbit enumeration was truncated (" + orbit.truncation_reason +
                              "); counts are only lower bounds");
    if (!(lo >= 0.0 && hi > lo && step > 0.0)) throw ParameterError("bad entropy window");
    if (hi > orbit.R + 1e-12)
        throw ResolutionError("entropy window ends beyond the enumerated radius");
    EntropyEstimate e;
    e.window_lo = lo;
    e.window_hi = hi;
    const int steps = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        const double r = lo + i * step;
        e.radii.push_back(r);
        e.log_counts.push_back(std::log(static_cast<double>(std::max<std::size_t>(1, orbit.count(r)))));
    }
    const std::size_t n = e.radii.size();
    if (n < 2) throw ParameterError("entropy window has fewer than two radii");
    e.slope = least_squares_slope(e.radii, e.log_counts);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += e.radii[i];
        my += e.log_counts[i];
    }
    mx /= n;
    my /= n;
    e.intercept = my - e.slope * mx;
    double sxx = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (e.radii[i] - mx) * (e.radii[i] - mx);
        const double res = e.log_counts[i] - (e.intercept + e.slope * e.radii[i]);
        sse += res * res;
    }
    e.standard_error = n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return e;
}

EntropyEstimate entropy(const OrbitBall& orbit) { return entropy(orbit, orbit.R / 2, orbit.R); }

std::optional<cplx> to_riemann(const Vec& xi) {
    if (xi.size() == 2) return cplx(xi[0], xi[1]);
    if (1.0 - xi[2] < 1e-15) return std::nullopt;
    const Vec y = stereographic(xi);
    return cplx(y[0], y[1]);
}

Vec from_riemann(std::optional<cplx> z, int boundary_dim) {
    if (boundary_dim == 1) {
        if (!z) throw DomainError("circle point mapped to infinity");
        const double r = std::abs(*z);
        return {z->real() / r, z->imag() / r};
    }
    if (!z) return {0.0, 0.0, 1.0};
    return inverse_stereographic({z->real(), z->imag()});
}

Vec boundary_image(const GroupActionModel& model, const Mobius& g, const Vec& xi) {
    check_unit(xi, model.boundary_dim());
    return from_riemann(g.apply(to_riemann(xi)), model.boundary_dim());
}

namespace {

// Quad-precision complex numbers, kept minimal: + - * / and squared modulus.
struct qcplx {
    __float128 re = 0, im = 0;
};
qcplx operator-(qcplx x, qcplx y) { return {x.re - y.re, x.im - y.im}; }
qcplx operator+(qcplx x, qcplx y) { return {x.re + y.re, x.im + y.im}; }
qcplx operator*(qcplx x, qcplx y) { return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re}; }
__float128 norm(qcplx x) { return x.re * x.re + x.im * x.im; }
qcplx operator/(qcplx x, qcplx y) {
    const __float128 n = norm(y);
    return {(x.re * y.re + x.im * y.im) / n, (x.im * y.re - x.re * y.im) / n};
}
qcplx quad(cplx z) { return {z.real(), z.imag()}; }

// Riemann-sphere coordinate; nullopt is infinity.
std::optional<qcplx> riemann_q(const Vec& xi) {
    if (xi.size() == 2) return qcplx{xi[0], xi[1]};
    const __float128 den = 1 - static_cast<__float128>(xi[2]);
    if (den < 1e-15) return std::nullopt;
    return qcplx{xi[0] / den, xi[1] / den};
}

std::optional<qcplx> apply_q(const Mobius& g, std::optional<qcplx> z) {
    const qcplx a = quad(g.a), b = quad(g.b), c = quad(g.c), d = quad(g.d);
    if (!z) {
        if (norm(c) == 0) return std::nullopt;
        return a / c;
    }
    const qcplx den = c * *z + d;
    if (norm(den) == 0) return std::nullopt;
    return (a * *z + b) / den;
}

// Squared chordal distance up to the per-point factors that cancel in a
// cross-ratio (each point appears once above and once below the bar).
__float128 pair_factor(std::optional<qcplx> z, std::optional<qcplx> w) {
    if (!z || !w) return 1;
    return norm(*z - *w);
}

}  // namespace

BoundaryActionReport boundary_action(const GroupActionModel& model, const Mobius& g,
                                     const std::vector<Vec>& points, std::uint64_t quadruple_budget,
                                     std::uint64_t seed) {
    BoundaryActionReport r;
    // Long words squeeze most of the circle next to the attracting point, so
    // images are compared in quad precision; `images` are for output only.
    std::vector<std::optional<qcplx>> src, img;
    for (const auto& xi : points) {
        r.images.push_back(boundary_image(model, g, xi));
        src.push_back(riemann_q(xi));
        img.push_back(apply_q(g, src.back()));
    }
    if (points.size() < 4) return r;
    const auto quads = sample_quadruples(points.size(), quadruple_budget, seed);
    auto cr2 = [](const std::vector<std::optional<qcplx>>& p, const Quadruple& q) {
        return pair_factor(p[q[0]], p[q[2]]) * pair_factor(p[q[1]], p[q[3]]) /
               (pair_factor(p[q[0]], p[q[3]]) * pair_factor(p[q[1]], p[q[2]]));
    };
    for (const auto& q : quads) {
        const double ratio = std::sqrt(static_cast<double>(cr2(img, q) / cr2(src, q)));
        r.max_deviation = std::max(r.max_deviation, std::abs(ratio - 1.0));
        r.C = std::max(r.C, ratio);
        ++r.quadruples;
    }
    return r;
}

Mobius random_word(const GroupActionModel& model, std::size_t length, Rng& rng,
                   std::vector<std::size_t>* letters) {
    Mobius g = Mobius::identity();
    std::size_t prev = model.generators.size();
    if (letters) letters->clear();
    for (std::size_t i = 0; i < length; ++i) {
        std::size_t s;
        do {
            s = rng.index(model.generators.size());
        } while (prev < model.generators.size() && s == model.inverse_of[prev] &&
                 model.generators.size() > 1);
        g = (g * model.generators[s]).canonical();
        if (letters) letters->push_back(s);
        prev = s;
    }
    return g;
}

std::vector<Mobius> word_ball(const GroupActionModel& model, std::size_t max_length, std::size_t cap) {
    // A generic interior point has trivial stabilizer, so its orbit separates elements.
    const cplx probe_disk = model.kind == ModelKind::h2_disk ? cplx(0.1234, 0.0567) : cplx(0.0);
    const UpperPoint probe_upper{cplx(0.1234, 0.0567), 1.0731};
    PointIndex index(1e-10, 1e-12);
    std::vector<Mobius> out{Mobius::identity()};
    index.insert(orbit_coordinates(model, out[0], probe_disk, probe_upper));
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= max_length; ++len) {
        const std::size_t level_end = out.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (const auto& s : model.generators) {
                const Mobius h = (out[i] * s).canonical();
                const auto c = orbit_coordinates(model, h, probe_disk, probe_upper);
                if (index.find(c)) continue;
                index.insert(c);
                out.push_back(h);
                if (out.size() >= cap) return out;
            }
        level_begin = level_end;
    }
    return out;
}

std::optional<Vec> attracting_fixed_point(const GroupActionModel& model, const Mobius& g0) {
    if (!loxodromic(model, g0)) return std::nullopt;
    const Mobius g = g0.canonical();
    const double scale = std::sqrt(g.frobenius2());
    std::optional<cplx> fix;
    if (std::abs(g.c) <= 1e-14 * scale) {
        // Fixes infinity and b / (d - a); infinity attracts when |a| > |d|.
        if (std::abs(g.a) > std::abs(g.d)) fix = std::nullopt;
        else fix = g.b / (g.d - g.a);
    } else {
        const cplx root = std::sqrt((g.a + g.d) * (g.a + g.d) - 4.0);
        const cplx z1 = (g.a - g.d + root) / (2.0 * g.c);
        const cplx z2 = (g.a - g.d - root) / (2.0 * g.c);
        fix = std::abs(g.c * z1 + g.d) > std::abs(g.c * z2 + g.d) ? z1 : z2;
    }
    return from_riemann(fix, model.boundary_dim());
}

LimitSetSample limit_set_sample(const GroupActionModel& model, std::size_t depth, std::uint64_t seed,
                                std::size_t word_cap) {
    if (depth < 1) throw ParameterError("limit set depth must be at least 1");
    LimitSetSample out;
    PointIndex index(1e-8, 1e-9);
    Rng rng(seed);
    struct Word {
        Mobius g;
        std::size_t last;
    };
    std::vector<Word> level;
    for (std::size_t s = 0; s < model.generators.size(); ++s) level.push_back({model.generators[s], s});
    for (std::size_t len = 1; len <= depth; ++len) {
        if (len > 1) {
            std::vector<Word> next;
            for (const auto& w : level)
                for (std::size_t s = 0; s < model.generators.size(); ++s) {
                    if (s == model.inverse_of[w.last]) continue;
                    next.push_back({(w.g * model.generators[s]).canonical(), s});
                }
            level = std::move(next);
        }
        if (level.size() > word_cap) {
            rng.shuffle(level);
            level.resize(word_cap);
            ++out.subsampled_levels;
        }
        out.words += level.size();
        for (const auto& w : level) {
            auto fp = attracting_fixed_point(model, w.g);
            if (!fp) continue;
            const auto key = as3(*fp);
            if (index.find(key)) continue;
            index.insert(key);
            out.points.push_back(*fp);
        }
        out.level_end.push_back(out.points.size());
    }
    if (out.points.empty()) out.warning = "no hyperbolic words up to the requested depth";
    return out;
}

FiniteMetricSpace boundary_space(const std::vector<Vec>& points, std::string label) {
    const std::size_t n = points.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = chordal(points[i], points[j]);
    return FiniteMetricSpace(n, std::move(d), std::move(label), Validation::none,
                             std::vector<std::vector<double>>(points.begin(), points.end()));
}

namespace {

std::size_t box_count(const std::vector<Vec>& pts, std::size_t count, double r) {
    std::unordered_set<Key, KeyHash> boxes;
    for (std::size_t i = 0; i < count; ++i) {
        const auto p = as3(pts[i]);
        boxes.insert(Key{static_cast<std::int64_t>(std::floor(p[0] / r)),
                         static_cast<std::int64_t>(std::floor(p[1] / r)),
                         static_cast<std::int64_t>(std::floor(p[2] / r))});
    }
    return boxes.size();
}

void fit_resolved(BoxCountFit& fit) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < fit.radii.size(); ++i) {
        if (!fit.resolved[i]) continue;
        xs.push_back(-std::log(fit.radii[i]));
        ys.push_back(std::log(static_cast<double>(fit.counts[i])));
    }
    fit.resolved_count = xs.size();
    fit.slope = xs.size() >= 2 ? least_squares_slope(xs, ys) : 0.0;
}

}  // namespace

BoxCountFit limit_set_dimension(const GroupActionModel& model, std::size_t depth,
                                const std::vector<double>& radii, std::uint64_t seed,
                                std::size_t word_cap) {
    if (depth < 2) throw ParameterError("box counting needs depth >= 2");
    const auto sample = limit_set_sample(model, depth, seed, word_cap);
    BoxCountFit fit;
    fit.radii = radii;
    const std::size_t prev = sample.level_end[depth - 2];
    for (double r : radii) {
        if (!(r > 0.0)) throw ParameterError("box sizes must be positive");
        const auto a = box_count(sample.points, sample.points.size(), r);
        const auto b = box_count(sample.points, prev, r);
        fit.counts.push_back(a);
        fit.counts_prev.push_back(b);
        fit.resolved.push_back(b > 0 && static_cast<double>(a) <= 1.05 * static_cast<double>(b));
    }
    fit_resolved(fit);
    return fit;
}

BoxCountFit net_count_dimension(const FiniteMetricSpace& space, const std::vector<double>& radii) {
    BoxCountFit fit;
    fit.radii = radii;
    std::vector<Index> order(space.size());
    for (Index i = 0; i < space.size(); ++i) order[i] = i;
    for (double r : radii) {
        const auto net = max_separated_net(space, r, order);
        fit.counts.push_back(net.members.size());
        fit.counts_prev.push_back(net.members.size());
        fit.resolved.push_back(1);
    }
    fit_resolved(fit);
    return fit;
}

BoundarySample analytic_boundary_sample(const GroupActionModel& model, const std::vector<Vec>& points) {
    const int dim = model.boundary_dim();
    // Move the base point to the centre of the disk / ball.
    Mobius to_centre = Mobius::identity();
    if (model.kind == ModelKind::h2_disk) {
        if (model.base_disk != cplx(0.0)) to_centre = disk_translation_to(model.base_disk).inverse();
    } else {
        const auto& p = model.base_upper;
        const double r = std::sqrt(p.t);
        to_centre = Mobius{cplx(r), p.x / r, cplx(0.0), cplx(1.0 / r)}.inverse();
    }
    std::vector<Vec> moved;
    for (const auto& xi : points) {
        check_unit(xi, dim);
        moved.push_back(from_riemann(to_centre.apply(to_riemann(xi)), dim));
    }
    BoundarySample s;
    s.source = "analytic";
    s.gromov.n = points.size();
    s.gromov.products.assign(points.size() * points.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < points.size(); ++i) {
        s.labels.push_back("xi" + std::to_string(i));
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            const double c = chordal(moved[i], moved[j]);
            if (!(c > 0.0)) throw ValidationError("repeated boundary point");
            s.gromov.at(i, j) = std::max(0.0, -std::log(c / 2.0));
        }
    }
    return s;
}

TripleSeparation separate_triple(const GroupActionModel& model, const std::array<Vec, 3>& triple,
                                 std::size_t word_budget, double tau) {
    if (word_budget == 0) throw ParameterError("word budget must be positive");
    TripleSeparation r;
    r.input_min = min_pairwise(triple);
    if (!(r.input_min > 0.0)) throw ParameterError("triple points must be distinct");
    r.achieved = -1.0;
    for (const auto& g : word_ball(model, word_budget)) {
        const std::array<Vec, 3> img{boundary_image(model, g, triple[0]),
                                     boundary_image(model, g, triple[1]),
                                     boundary_image(model, g, triple[2])};
        const double m = min_pairwise(img);
        ++r.words_searched;
        if (tau > 0.0 && m >= tau) ++r.count_at_tau;
        if (m > r.achieved) {
            r.achieved = m;
            r.g = g;
        }
    }
    return r;
}

RoughIsometryDefect rough_isometry_defect(const FiniteMetricSpace& source,
                                          const FiniteMetricSpace& target, double far_fraction) {
    if (source.size() != target.size()) throw ShapeError("correspondence sizes differ");
    const std::size_t n = source.size();
    RoughIsometryDefect r;
    if (n < 2) return r;
    const double far = far_fraction * source.diam();
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double d = source(i, j), t = target(i, j);
            if (d >= far && d > 0.0 && t > 0.0) r.lambda = std::max({r.lambda, t / d, d / t});
        }
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double d = source(i, j), t = target(i, j);
            r.k = std::max({r.k, t - r.lambda * d, d / r.lambda - t});
        }
    return r;
}

FiniteMetricSpace disk_space(const std::vector<cplx>& points, std::string label) {
    const std::size_t n = points.size();
    std::vector<double> d(n * n, 0.0);
    std::vector<std::vector<double>> coords;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(points[i]) < 1.0)) throw DomainError("point outside the open disk");
        coords.push_back({points[i].real(), points[i].imag()});
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = h2_distance(points[i], points[j]);
    }
    return FiniteMetricSpace(n, std::move(d), std::move(label), Validation::automatic, std::move(coords));
}

}  // namespace qmr
