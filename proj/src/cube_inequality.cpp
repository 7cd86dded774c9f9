#include "qmr/cube_inequality.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include "qmr/errors.hpp"
#include "qmr/rng.hpp"

namespace qmr {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Grid {
    int n;
    int g;
    std::size_t cells;

    Grid(int n_, int g_) : n(n_), g(g_), cells(1) {
        for (int k = 0; k < n; ++k) cells *= static_cast<std::size_t>(g);
    }

    double centre(int i) const { return (i + 0.5) / g; }

    // Index range of cells whose centres lie in [lo, hi]; empty when first > last.
    std::pair<int, int> span(double lo, double hi) const {
        int first = static_cast<int>(std::ceil(lo * g - 0.5 - 1e-9));
        int last = static_cast<int>(std::floor(hi * g - 0.5 + 1e-9));
        return {std::max(first, 0), std::min(last, g - 1)};
    }

    template <typename F>
    void for_each_cell(const Box& b, F&& f) const {
        std::vector<std::pair<int, int>> r(n);
        for (int k = 0; k < n; ++k) {
            r[k] = span(b.lo[k], b.hi[k]);
            if (r[k].first > r[k].second) return;
        }
        std::vector<int> idx(n);
        for (int k = 0; k < n; ++k) idx[k] = r[k].first;
        while (true) {
            std::size_t flat = 0;
            for (int k = n - 1; k >= 0; --k) flat = flat * g + idx[k];
            f(flat);
            int k = 0;
            while (k < n && ++idx[k] > r[k].second) {
                idx[k] = r[k].first;
                ++k;
            }
            if (k == n) return;
        }
    }

    std::vector<double> centre_of(std::size_t flat) const {
        std::vector<double> x(n);
        for (int k = 0; k < n; ++k) {
            x[k] = centre(static_cast<int>(flat % g));
            flat /= g;
        }
        return x;
    }
};

// Per-cell coverage count and sum of covering set ids; count 1 makes the
// sum the unique owner.
struct Coverage {
    std::vector<std::uint32_t> count;
    std::vector<std::uint64_t> owner_sum;
    std::vector<std::uint32_t> stamp;
    std::uint32_t clock = 0;

    explicit Coverage(std::size_t cells) : count(cells, 0), owner_sum(cells, 0), stamp(cells, 0) {}

    // Applies +1/-1 for every cell of the set, counting overlapping boxes once.
    template <typename OnCell>
    void apply(const Grid& grid, const CubeSet& s, std::size_t id, int sign, OnCell&& on_cell) {
        ++clock;
        for (const auto& b : s.boxes) {
            grid.for_each_cell(b, [&](std::size_t c) {
                if (stamp[c] == clock) return;
                stamp[c] = clock;
                if (sign > 0) {
                    ++count[c];
                    owner_sum[c] += id;
                } else {
                    --count[c];
                    owner_sum[c] -= id;
                }
                on_cell(c);
            });
        }
    }
};

bool contains(const Box& b, const std::vector<double>& x) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] < b.lo[k] || x[k] > b.hi[k]) return false;
    return true;
}

bool contains(const CubeSet& s, const std::vector<double>& x) {
    for (const auto& b : s.boxes)
        if (contains(b, x)) return true;
    return false;
}

std::vector<std::vector<std::size_t>> nerve_of(const std::vector<const CubeSet*>& sets) {
    std::vector<std::vector<std::size_t>> adj(sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a)
        for (std::size_t b = a + 1; b < sets.size(); ++b)
            if (sets_intersect(*sets[a], *sets[b])) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
    return adj;
}

// BFS levels from every set meeting F_axis (level 1).
std::vector<std::size_t> levels_from_face(const std::vector<const CubeSet*>& sets,
                                          const std::vector<std::vector<std::size_t>>& adj,
                                          int axis, std::vector<std::size_t>* parent) {
    std::vector<std::size_t> level(sets.size(), kNone);
    if (parent) parent->assign(sets.size(), kNone);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (meets_face(*sets[i], axis, false)) {
            level[i] = 1;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (auto v : adj[u])
            if (level[v] == kNone) {
                level[v] = level[u] + 1;
                if (parent) (*parent)[v] = u;
                queue.push_back(v);
            }
    }
    return level;
}

std::size_t face_distance(const std::vector<const CubeSet*>& sets,
                          const std::vector<std::size_t>& level, int axis, std::size_t* best_set) {
    std::size_t best = kNone;
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (meets_face(*sets[i], axis, true) && level[i] < best) {
            best = level[i];
            if (best_set) *best_set = i;
        }
    if (best == kNone) {
        throw ResolutionError("no chain of sets joins the faces of axis " +
                              std::to_string(axis + 1) + "; the sets do not cover the cube");
    }
    return best;
}

std::vector<const CubeSet*> pointers(const CubeCover& cover) {
    std::vector<const CubeSet*> out;
    for (const auto& s : cover.sets) out.push_back(&s);
    return out;
}

Box make_box(int n) {
    Box b;
    b.lo.assign(n, 0.0);
    b.hi.assign(n, 1.0);
    return b;
}

}  // namespace

int default_grid_resolution(int n) { return n <= 2 ? 512 : 64; }

int CubeCover::resolution() const {
    return grid_resolution > 0 ? grid_resolution : default_grid_resolution(n);
}

void validate_cover(const CubeCover& cover) {
    if (cover.n < 1 || cover.n > 3) throw ParameterError("cube dimension must be 1, 2 or 3");
    if (cover.sets.empty()) throw ParameterError("cover has no sets");
    for (std::size_t i = 0; i < cover.sets.size(); ++i) {
        const auto& s = cover.sets[i];
        if (s.boxes.empty()) throw ParameterError("set " + std::to_string(i) + " is empty");
        for (const auto& b : s.boxes) {
            if (b.lo.size() != static_cast<std::size_t>(cover.n) ||
                b.hi.size() != static_cast<std::size_t>(cover.n)) {
                throw ShapeError("box dimension differs from cover dimension");
            }
            for (int k = 0; k < cover.n; ++k) {
                if (!(b.lo[k] >= 0.0 && b.hi[k] <= 1.0 && b.lo[k] < b.hi[k])) {
                    throw ParameterError("set " + std::to_string(i) +
                                         " has a degenerate box or leaves the cube");
                }
            }
        }
    }
}

bool covers_cube(const CubeCover& cover) {
    validate_cover(cover);
    const Grid grid(cover.n, cover.resolution());
    std::vector<char> hit(grid.cells, 0);
    for (const auto& s : cover.sets)
        for (const auto& b : s.boxes) grid.for_each_cell(b, [&](std::size_t c) { hit[c] = 1; });
    return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

bool boxes_intersect(const Box& a, const Box& b) {
    for (std::size_t k = 0; k < a.lo.size(); ++k)
        if (std::max(a.lo[k], b.lo[k]) > std::min(a.hi[k], b.hi[k])) return false;
    return true;
}

bool sets_intersect(const CubeSet& a, const CubeSet& b) {
    for (const auto& x : a.boxes)
        for (const auto& y : b.boxes)
            if (boxes_intersect(x, y)) return true;
    return false;
}

bool meets_face(const CubeSet& s, int axis, bool far) {
    for (const auto& b : s.boxes) {
        if (!far && b.lo[axis] <= 0.0) return true;
        if (far && b.hi[axis] >= 1.0) return true;
    }
    return false;
}

std::vector<std::vector<std::size_t>> set_nerve(const CubeCover& cover) {
    return nerve_of(pointers(cover));
}

FaceChainResult face_chain_distance(const CubeCover& cover, int axis) {
    validate_cover(cover);
    if (axis < 1 || axis > cover.n) throw ParameterError("axis must lie in 1..n");
    const auto sets = pointers(cover);
    const auto adj = nerve_of(sets);
    std::vector<std::size_t> parent;
    const auto level = levels_from_face(sets, adj, axis - 1, &parent);
    std::size_t end = 0;
    FaceChainResult r;
    r.axis = axis;
    r.d = face_distance(sets, level, axis - 1, &end);
    for (std::size_t v = end; v != kNone; v = parent[v]) r.witness.push_back(v);
    std::reverse(r.witness.begin(), r.witness.end());
    return r;
}

LengthVolumeResult check_length_volume(const CubeCover& cover) {
    validate_cover(cover);
    const auto sets = pointers(cover);
    const auto adj = nerve_of(sets);
    LengthVolumeResult r;
    r.N = cover.sets.size();
    for (int k = 0; k < cover.n; ++k) {
        std::vector<std::size_t> parent;
        const auto level = levels_from_face(sets, adj, k, &parent);
        std::size_t end = 0;
        const auto dk = face_distance(sets, level, k, &end);
        std::vector<std::size_t> chain;
        for (std::size_t v = end; v != kNone; v = parent[v]) chain.push_back(v);
        std::reverse(chain.begin(), chain.end());
        r.d.push_back(dk);
        r.witnesses.push_back(std::move(chain));
        r.product *= static_cast<double>(dk);
    }
    r.holds = static_cast<double>(r.N) >= r.product;
    return r;
}

ChainCountMap chain_count_map(const CubeCover& cover) {
    validate_cover(cover);
    const Grid grid(cover.n, cover.resolution());
    Coverage cov(grid.cells);
    for (std::size_t i = 0; i < cover.sets.size(); ++i)
        cov.apply(grid, cover.sets[i], i, +1, [](std::size_t) {});
    for (std::size_t c = 0; c < grid.cells; ++c)
        if (cov.count[c] == 0) throw ValidationError("sets do not cover the membership grid");

    // Drop redundant sets one at a time (lowest index first) until every set
    // owns a cell.
    std::vector<char> alive(cover.sets.size(), 1);
    std::vector<std::size_t> exclusive(cover.sets.size(), kNone);
    ChainCountMap out;
    while (true) {
        std::fill(exclusive.begin(), exclusive.end(), kNone);
        for (std::size_t c = 0; c < grid.cells; ++c)
            if (cov.count[c] == 1 && exclusive[cov.owner_sum[c]] == kNone)
                exclusive[cov.owner_sum[c]] = c;
        std::size_t drop = kNone;
        for (std::size_t i = 0; i < cover.sets.size(); ++i)
            if (alive[i] && exclusive[i] == kNone) {
                drop = i;
                break;
            }
        if (drop == kNone) break;
        alive[drop] = 0;
        out.dropped.push_back(drop);
        cov.apply(grid, cover.sets[drop], drop, -1, [](std::size_t) {});
    }

    std::vector<const CubeSet*> sets;
    for (std::size_t i = 0; i < cover.sets.size(); ++i)
        if (alive[i]) {
            out.kept.push_back(i);
            sets.push_back(&cover.sets[i]);
            out.witness_points.push_back(grid.centre_of(exclusive[i]));
        }
    const auto adj = nerve_of(sets);
    out.f0.assign(sets.size(), std::vector<std::size_t>(cover.n, 0));
    for (int k = 0; k < cover.n; ++k) {
        const auto level = levels_from_face(sets, adj, k, nullptr);
        const auto dk = face_distance(sets, level, k, nullptr);
        out.d.push_back(dk);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            out.f0[i][k] = level[i];
            if (meets_face(*sets[i], k, false) && level[i] != 1) out.face_claim_holds = false;
            if (meets_face(*sets[i], k, true) && level[i] < dk) out.far_face_claim_holds = false;
        }
        // Boundary points: cell centres pushed onto the two faces of axis k.
        const int g = grid.g;
        for (std::size_t c = 0; c < grid.cells; ++c) {
            auto x = grid.centre_of(c);
            const int ik = static_cast<int>(std::lround(x[k] * g - 0.5));
            if (ik != 0 && ik != g - 1) continue;
            const bool far = ik == g - 1;
            x[k] = far ? 1.0 : 0.0;
            ++out.boundary_points_checked;
            for (std::size_t i = 0; i < sets.size(); ++i) {
                if (!contains(*sets[i], x)) continue;
                if (!far && level[i] != 1) out.face_claim_holds = false;
                if (far && level[i] < dk) out.far_face_claim_holds = false;
            }
        }
    }
    return out;
}

CubeCover single_set_cover(int n) {
    CubeCover c;
    c.n = n;
    c.sets.push_back(CubeSet{{make_box(n)}});
    return c;
}

CubeCover grid_cover(int n, int m, double inflation) {
    if (m < 1) throw ParameterError("grid cover needs m >= 1");
    CubeCover c;
    c.n = n;
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) total *= m;
    for (std::size_t t = 0; t < total; ++t) {
        Box b = make_box(n);
        std::size_t rest = t;
        for (int k = 0; k < n; ++k) {
            const auto i = static_cast<int>(rest % m);
            rest /= m;
            b.lo[k] = std::max(0.0, static_cast<double>(i) / m - inflation);
            b.hi[k] = std::min(1.0, static_cast<double>(i + 1) / m + inflation);
        }
        c.sets.push_back(CubeSet{{b}});
    }
    return c;
}

CubeCover slab_cover(int n) {
    CubeCover c;
    c.n = n;
    Box a = make_box(n), b = make_box(n);
    a.hi[0] = 0.6;
    b.lo[0] = 0.4;
    c.sets.push_back(CubeSet{{a}});
    c.sets.push_back(CubeSet{{b}});
    return c;
}

CubeCover random_box_cover(int n, std::size_t max_sets, std::uint64_t seed,
                           const RandomCoverOptions& options) {
    if (n < 1 || n > 3) throw ParameterError("cube dimension must be 1, 2 or 3");
    if (max_sets == 0) throw ParameterError("max_sets must be positive");
    if (!(options.min_side > 0.0 && options.min_side <= options.max_side && options.max_side <= 1.0))
        throw ParameterError("box sides must satisfy 0 < min_side <= max_side <= 1");
    const int g = options.grid_resolution > 0 ? options.grid_resolution : default_grid_resolution(n);
    const Grid grid(n, g);
    auto snap = [g](double x) { return std::clamp(std::round(x * g) / g, 0.0, 1.0); };

    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(attempt)));
        auto box_at = [&](const std::vector<double>& centre) {
            Box b = make_box(n);
            for (int k = 0; k < n; ++k) {
                const double s = rng.uniform(options.min_side, options.max_side);
                b.lo[k] = snap(centre[k] - s / 2);
                b.hi[k] = snap(centre[k] + s / 2);
                if (b.hi[k] <= b.lo[k]) {
                    // Keep at least one cell.
                    if (b.lo[k] > 0.0) b.lo[k] = b.hi[k] - 1.0 / g;
                    else b.hi[k] = b.lo[k] + 1.0 / g;
                }
            }
            return b;
        };
        auto random_centre = [&] {
            std::vector<double> c(n);
            for (auto& x : c) x = rng.uniform();
            return c;
        };

        CubeCover cover;
        cover.n = n;
        cover.grid_resolution = g;
        Coverage cov(grid.cells);
        std::size_t uncovered = grid.cells;
        const std::size_t random_phase =
            std::max<std::size_t>(1, static_cast<std::size_t>(rng.uniform(0.1, 0.8) * max_sets));
        std::vector<std::size_t> pending;
        bool targeting = false;
        while (uncovered > 0 && cover.sets.size() < max_sets) {
            std::vector<double> centre;
            if (cover.sets.size() >= random_phase) {
                if (!targeting) {
                    targeting = true;
                    for (std::size_t c = 0; c < grid.cells; ++c)
                        if (cov.count[c] == 0) pending.push_back(c);
                }
                while (true) {
                    const auto j = rng.index(pending.size());
                    if (cov.count[pending[j]] == 0) {
                        centre = grid.centre_of(pending[j]);
                        break;
                    }
                    pending[j] = pending.back();
                    pending.pop_back();
                }
            } else {
                centre = random_centre();
            }
            CubeSet s;
            s.boxes.push_back(box_at(centre));
            if (rng.uniform() < options.union_probability) s.boxes.push_back(box_at(random_centre()));
            cov.apply(grid, s, cover.sets.size(), +1, [&](std::size_t c) {
                if (cov.count[c] == 1) --uncovered;
            });
            cover.sets.push_back(std::move(s));
        }
        if (uncovered == 0) return cover;
    }
    throw ResolutionError("random cover exceeded " + std::to_string(max_sets) +
                          " sets on every attempt");
}

FuzzReport fuzz_length_volume(int n, std::size_t instances, std::size_t max_sets,
                              std::uint64_t seed, const RandomCoverOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    FuzzReport report;
    report.n = n;
    report.instances = instances;
    report.max_sets = max_sets;
    for (std::size_t i = 0; i < instances; ++i) {
        FuzzInstance rec;
        rec.seed = Rng::derive(seed, i);
        const CubeCover cover = random_box_cover(n, max_sets, rec.seed, options);
        const auto r = check_length_volume(cover);
        rec.N = r.N;
        rec.d = r.d;
        rec.product = r.product;
        rec.holds = r.holds;
        if (!rec.holds) {
            ++report.violations;
            report.falsifications.push_back(cover);
        }
        report.records.push_back(std::move(rec));
    }
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace qmr
