#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmr/metric_space.hpp"

namespace qmr {

/// Symmetric matrix of Gromov products. For interior tables the diagonal is
/// d(x, p); for boundary samples it is +inf.
struct GromovTable {
    std::size_t n = 0;
    Index base = 0;  ///< meaningless for boundary samples
    std::vector<double> products;

    double operator()(Index i, Index j) const { return products[i * n + j]; }
    double& at(Index i, Index j) { return products[i * n + j]; }
};

GromovTable gromov_products(const FiniteMetricSpace& space, Index base);

struct DeltaReport {
    double delta = 0.0;
    std::uint64_t triples = 0;
    bool exhaustive = true;
    std::array<Index, 3> worst{};
};

/// Smallest delta with (x,y)_p >= min((x,z)_p, (y,z)_p) - delta over ordered
/// triples. Exhaustive up to `exhaustive_limit` points, seeded sample above.
DeltaReport four_point_delta(const GromovTable& table, std::uint64_t seed = 0,
                             std::size_t exhaustive_limit = 2000,
                             std::uint64_t sample_triples = 20'000'000);

/// Boundary points with pairwise boundary Gromov products.
struct BoundarySample {
    std::vector<std::string> labels;
    GromovTable gromov;  ///< diagonal +inf
    std::string source;  ///< "analytic" or "orbit"
    double uncertainty = 0.0;  ///< additive slack on each entry (2 delta for orbit data)

    std::size_t size() const { return gromov.n; }
};

/// Checks symmetry, finite nonnegative off-diagonal entries.
void validate_boundary(const BoundarySample& sample);

struct AcuReport {
    double kappa = -1.0;
    double coefficient = 1.0;  ///< 1/sqrt(-kappa)
    /// Chain lengths h and the fitted c at each: max over sampled chains of
    /// min_i (x_i, x_{i-1}) - coefficient log h - (x_0, x_h).
    std::vector<std::size_t> lengths;
    std::vector<double> c_by_length;
    double c = 0.0;            ///< max over lengths
    double growth_slope = 0.0; ///< least-squares slope of c_h against log h
    bool violation = false;    ///< growth_slope above the threshold
    std::size_t sources = 0;
    std::size_t random_walks = 0;
};

/// Chains come from an exact-hop bottleneck dynamic program (the optimal
/// chain of each length from each sampled start) plus seeded random walks.
AcuReport acu_check(const GromovTable& table, double kappa, std::size_t budget, std::uint64_t seed,
                    std::size_t max_length = 64, double slope_threshold = 0.15);

struct VisualMetricReport {
    double eps = 1.0;
    std::size_t n = 0;
    std::vector<double> rho;
    std::vector<double> d_eps;
    double K = 1.0;
    double threshold = 1.4142135623730951;
    bool applicable = false;
    double min_ratio = 1.0;   ///< min d_eps / rho off the diagonal
    double max_ratio = 1.0;   ///< max d_eps / rho (<= 1)
    bool upper_holds = true;  ///< d_eps <= rho
    bool lower_holds = true;  ///< rho / 4 <= d_eps, checked only when applicable
};

VisualMetricReport visual_metric(const BoundarySample& boundary, double eps,
                                 double threshold = 1.4142135623730951);

/// Smallest K with rho(x,z) <= K max(rho(x,y), rho(y,z)) over distinct triples.
double quasi_metric_constant(std::size_t n, const std::vector<double>& rho);

struct ConvergenceResult {
    bool a_converges = false;
    bool b_converges = false;
    bool equivalent = false;
    std::vector<double> a_tail, b_tail, cross_tail;
};

/// Tail products t_j = min over n != m >= j of (x_n, x_m)_p; a sequence
/// converges at infinity when t_j is nondecreasing and grows by at least
/// `min_growth` across the tails. Equivalence uses the cross products.
ConvergenceResult convergence_at_infinity(const GromovTable& table, const std::vector<Index>& a,
                                          const std::vector<Index>& b, std::size_t window,
                                          double min_growth = 2.0);

}  // namespace qmr
