#include "qmr/hyperbolic.hpp"

#include <algorithm>
#include <limits>

#include "qmr/errors.hpp"
#include "qmr/metric_core.hpp"
#include "qmr/rng.hpp"

namespace qmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nondecreasing(const std::vector<double>& t) {
    for (std::size_t j = 1; j < t.size(); ++j)
        if (t[j] < t[j - 1] - 1e-9) return false;
    return true;
}

bool grows(const std::vector<double>& t, double min_growth) {
    return !t.empty() && nondecreasing(t) && t.back() - t.front() >= min_growth;
}

}  // namespace

GromovTable gromov_products(const FiniteMetricSpace& space, Index base) {
    if (base >= space.size()) throw ShapeError("base point index out of range");
    GromovTable t;
    t.n = space.size();
    t.base = base;
    t.products.resize(t.n * t.n);
    const auto rp = space.row(base);
    for (Index i = 0; i < t.n; ++i) {
        const auto ri = space.row(i);
        for (Index j = 0; j < t.n; ++j) t.products[i * t.n + j] = 0.5 * (rp[i] + rp[j] - ri[j]);
    }
    return t;
}

DeltaReport four_point_delta(const GromovTable& table, std::uint64_t seed,
                             std::size_t exhaustive_limit, std::uint64_t sample_triples) {
    const std::size_t n = table.n;
    if (n < 3) throw ParameterError("four-point delta needs at least 3 points");
    DeltaReport r;
    auto visit = [&](Index x, Index y, Index z) {
        const double gap = std::min(table(x, z), table(y, z)) - table(x, y);
        if (gap > r.delta) {
            r.delta = gap;
            r.worst = {x, y, z};
        }
    };
    if (n <= exhaustive_limit) {
        for (Index x = 0; x < n; ++x)
            for (Index y = x + 1; y < n; ++y)
                for (Index z = 0; z < n; ++z) visit(x, y, z);
        r.triples = static_cast<std::uint64_t>(n) * (n - 1) / 2 * n;
        return r;
    }
    r.exhaustive = false;
    Rng rng(seed);
    for (std::uint64_t t = 0; t < sample_triples; ++t) {
        const Index x = rng.index(n), y = rng.index(n), z = rng.index(n);
        visit(x, y, z);
    }
    r.triples = sample_triples;
    return r;
}

void validate_boundary(const BoundarySample& s) {
    const auto& g = s.gromov;
    if (g.products.size() != g.n * g.n) throw ShapeError("boundary product matrix has wrong size");
    if (!s.labels.empty() && s.labels.size() != g.n) throw ShapeError("label count mismatch");
    for (Index i = 0; i < g.n; ++i)
        for (Index j = 0; j < g.n; ++j) {
            if (i == j) continue;
            const double v = g(i, j);
            if (!std::isfinite(v) || v < 0.0 || v != g(j, i))
                throw ValidationError("boundary products must be symmetric, finite and >= 0 off the diagonal");
        }
}

AcuReport acu_check(const GromovTable& table, double kappa, std::size_t budget, std::uint64_t seed,
                    std::size_t max_length, double slope_threshold) {
    if (!(kappa < 0.0)) throw ParameterError("kappa must be negative");
    if (budget == 0) throw ParameterError("chain budget must be positive");
    if (max_length < 2) throw ParameterError("max chain length must be at least 2");
    const std::size_t n = table.n;
    if (n < 2) throw ParameterError("need at least two points");

    AcuReport r;
    r.kappa = kappa;
    r.coefficient = 1.0 / std::sqrt(-kappa);
    r.lengths.resize(max_length);
    r.c_by_length.assign(max_length, -kInf);
    for (std::size_t h = 1; h <= max_length; ++h) r.lengths[h - 1] = h;

    Rng rng(seed);
    auto sources = seeded_order(n, Rng::derive(seed, 1));
    sources.resize(std::min(budget, n));
    r.sources = sources.size();

    std::vector<double> cur(n), next(n);
    for (Index x0 : sources) {
        for (Index v = 0; v < n; ++v) cur[v] = table(x0, v);
        for (std::size_t h = 1; h <= max_length; ++h) {
            if (h > 1) {
                for (Index v = 0; v < n; ++v) {
                    double best = -kInf;
                    for (Index u = 0; u < n; ++u) best = std::max(best, std::min(cur[u], table(u, v)));
                    next[v] = best;
                }
                std::swap(cur, next);
            }
            const double pen = r.coefficient * std::log(static_cast<double>(h));
            double& slot = r.c_by_length[h - 1];
            for (Index v = 0; v < n; ++v) {
                if (v == x0) continue;
                slot = std::max(slot, cur[v] - pen - table(x0, v));
            }
        }
    }
    for (std::size_t w = 0; w < budget; ++w) {
        const std::size_t h = 1 + rng.index(max_length);
        Index x = rng.index(n);
        const Index x0 = x;
        double m = kInf;
        for (std::size_t s = 0; s < h; ++s) {
            const Index y = rng.index(n);
            m = std::min(m, table(x, y));
            x = y;
        }
        ++r.random_walks;
        if (x == x0) continue;
        const double val = m - r.coefficient * std::log(static_cast<double>(h)) - table(x0, x);
        r.c_by_length[h - 1] = std::max(r.c_by_length[h - 1], val);
    }

    std::vector<double> xs, ys;
    r.c = -kInf;
    for (std::size_t h = 1; h <= max_length; ++h) {
        r.c = std::max(r.c, r.c_by_length[h - 1]);
        if (h >= 2) {
            xs.push_back(std::log(static_cast<double>(h)));
            ys.push_back(r.c_by_length[h - 1]);
        }
    }
    r.growth_slope = least_squares_slope(xs, ys);
    r.violation = r.growth_slope > slope_threshold;
    return r;
}

double quasi_metric_constant(std::size_t n, const std::vector<double>& rho) {
    double K = 1.0;
    for (Index x = 0; x < n; ++x)
        for (Index z = x + 1; z < n; ++z) {
            const double target = rho[x * n + z];
            for (Index y = 0; y < n; ++y) {
                if (y == x || y == z) continue;
                const double m = std::max(rho[x * n + y], rho[y * n + z]);
                if (m > 0.0) K = std::max(K, target / m);
            }
        }
    return K;
}

VisualMetricReport visual_metric(const BoundarySample& boundary, double eps, double threshold) {
    if (!(eps > 0.0)) throw ParameterError("visual parameter must be positive");
    validate_boundary(boundary);
    const std::size_t n = boundary.size();
    VisualMetricReport r;
    r.eps = eps;
    r.n = n;
    r.threshold = threshold;
    r.rho.assign(n * n, 0.0);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j) r.rho[i * n + j] = std::exp(-eps * boundary.gromov(i, j));
    r.K = n >= 3 ? quasi_metric_constant(n, r.rho) : 1.0;
    r.applicable = r.K <= threshold;

    // Dense Dijkstra from every source over the complete graph with weights rho.
    r.d_eps.assign(n * n, 0.0);
    std::vector<double> dist(n);
    std::vector<char> done(n);
    for (Index s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        dist[s] = 0.0;
        for (std::size_t it = 0; it < n; ++it) {
            Index u = n;
            for (Index v = 0; v < n; ++v)
                if (!done[v] && (u == n || dist[v] < dist[u])) u = v;
            done[u] = 1;
            const double* row = r.rho.data() + u * n;
            for (Index v = 0; v < n; ++v)
                if (!done[v] && dist[u] + row[v] < dist[v]) dist[v] = dist[u] + row[v];
        }
        for (Index v = 0; v < n; ++v) r.d_eps[s * n + v] = dist[v];
    }
    r.min_ratio = kInf;
    r.max_ratio = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double ratio = r.d_eps[i * n + j] / r.rho[i * n + j];
            r.min_ratio = std::min(r.min_ratio, ratio);
            r.max_ratio = std::max(r.max_ratio, ratio);
        }
    if (n < 2) r.min_ratio = r.max_ratio = 1.0;
    r.upper_holds = r.max_ratio <= 1.0;
    r.lower_holds = !r.applicable || r.min_ratio >= 0.25;
    return r;
}

ConvergenceResult convergence_at_infinity(const GromovTable& table, const std::vector<Index>& a,
                                          const std::vector<Index>& b, std::size_t window,
                                          double min_growth) {
    if (window < 2) throw ParameterError("tail window must be at least 2");
    if (a.size() < window || b.size() < window)
        throw ParameterError("sequence shorter than the tail window");
    for (auto v : a)
        if (v >= table.n) throw ShapeError("sequence index out of range");
    for (auto v : b)
        if (v >= table.n) throw ShapeError("sequence index out of range");

    auto tails = [&](const std::vector<Index>& s) {
        const std::size_t L = s.size();
        std::vector<double> t(L - window + 1);
        double running = kInf;
        // Walk tails from the shortest to the longest.
        for (std::size_t j = L; j-- > 0;) {
            for (std::size_t m = j + 1; m < L; ++m) running = std::min(running, table(s[j], s[m]));
            if (j <= L - window) t[j] = running;
        }
        return t;
    };
    ConvergenceResult r;
    r.a_tail = tails(a);
    r.b_tail = tails(b);
    const std::size_t L = std::min(a.size(), b.size());
    r.cross_tail.resize(L - window + 1);
    double running = kInf;
    for (std::size_t j = L; j-- > 0;) {
        for (std::size_t m = j; m < L; ++m) {
            running = std::min(running, table(a[j], b[m]));
            running = std::min(running, table(a[m], b[j]));
        }
        if (j <= L - window) r.cross_tail[j] = running;
    }
    r.a_converges = grows(r.a_tail, min_growth);
    r.b_converges = grows(r.b_tail, min_growth);
    r.equivalent = r.a_converges && r.b_converges && grows(r.cross_tail, min_growth);
    return r;
}

}  // namespace qmr
