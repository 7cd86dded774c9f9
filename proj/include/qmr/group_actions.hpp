#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmr/hyperbolic.hpp"
#include "qmr/metric_core.hpp"
#include "qmr/metric_space.hpp"
#include "qmr/mobius.hpp"
#include "qmr/rng.hpp"
#include "qmr/sphere_geometry.hpp"

namespace qmr {

struct OrbitPoint {
    Mobius g;
    double distance = 0.0;             ///< d(p, g p)
    std::array<double, 3> ball{};      ///< g p in the disk / ball model
    std::uint32_t word_length = 0;
};

struct OrbitBall {
    std::string group;
    double R = 0.0;
    double margin = 0.0;
    /// Orbit points with d(p, gp) <= R, sorted by distance.
    std::vector<OrbitPoint> points;
    std::size_t explored = 0;  ///< points kept inside R + margin
    bool truncated = false;
    std::string truncation_reason;

    /// N(r) = #{g p : d(p, g p) <= r}.
    std::size_t count(double r) const;
};

struct OrbitOptions {
    std::uint32_t word_length_cap = 1u << 20;
    std::size_t max_points = 4'000'000;
    /// Extra pruning slack; negative picks 1e-9 for Dirichlet generators, 0.5 otherwise.
    double margin = -1.0;
};

OrbitBall orbit_ball(const GroupActionModel& model, double R, const OrbitOptions& options = {});

struct EntropyEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double standard_error = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    std::vector<double> radii;
    std::vector<double> log_counts;
};

/// Least-squares slope of log N(R) on a grid over [lo, hi]. Refuses
/// (ResolutionError) when the orbit ball is truncated or smaller than hi.
EntropyEstimate entropy(const OrbitBall& orbit, double lo, double hi, double step = 0.25);

/// Default window: the upper half of [0, R].
EntropyEstimate entropy(const OrbitBall& orbit);

// Boundary points are unit vectors in R^2 (S^1) or R^3 (S^2).
Vec boundary_image(const GroupActionModel& model, const Mobius& g, const Vec& xi);
std::optional<cplx> to_riemann(const Vec& xi);
Vec from_riemann(std::optional<cplx> z, int boundary_dim);

struct BoundaryActionReport {
    std::vector<Vec> images;
    std::uint64_t quadruples = 0;
    double max_deviation = 0.0;  ///< max |cr(image) / cr(source) - 1|
    double C = 1.0;              ///< max cr(image) / cr(source)
};

/// Cross-ratio distortion of g on a boundary sample, over `quadruple_budget`
/// seeded quadruples (all of them when fewer exist).
BoundaryActionReport boundary_action(const GroupActionModel& model, const Mobius& g,
                                     const std::vector<Vec>& points, std::uint64_t quadruple_budget,
                                     std::uint64_t seed);

/// Random reduced word of the given length and its product.
Mobius random_word(const GroupActionModel& model, std::size_t length, Rng& rng,
                   std::vector<std::size_t>* letters = nullptr);

/// All distinct group elements of reduced word length <= max_length (identity first).
std::vector<Mobius> word_ball(const GroupActionModel& model, std::size_t max_length,
                              std::size_t cap = 2'000'000);

/// Attracting fixed point of a hyperbolic / loxodromic element, else nullopt.
std::optional<Vec> attracting_fixed_point(const GroupActionModel& model, const Mobius& g);

struct LimitSetSample {
    std::vector<Vec> points;
    /// points[0, level_end[L-1]) come from words of length <= L.
    std::vector<std::size_t> level_end;
    std::size_t words = 0;
    std::size_t subsampled_levels = 0;
    std::optional<std::string> warning;
};

LimitSetSample limit_set_sample(const GroupActionModel& model, std::size_t depth, std::uint64_t seed,
                                std::size_t word_cap = 400'000);

/// Chordal finite metric space on boundary points.
FiniteMetricSpace boundary_space(const std::vector<Vec>& points, std::string label = "boundary");

struct BoxCountFit {
    std::vector<double> radii;
    std::vector<std::size_t> counts;       ///< at the full depth
    std::vector<std::size_t> counts_prev;  ///< one level shallower
    std::vector<char> resolved;            ///< counts / counts_prev <= 1.05
    double slope = 0.0;                    ///< fitted on resolved radii
    std::size_t resolved_count = 0;
};

/// Box counts of the limit set (ambient grid of side r), comparing depth D
/// with D-1 to keep only radii where the sample has converged.
BoxCountFit limit_set_dimension(const GroupActionModel& model, std::size_t depth,
                                const std::vector<double>& radii, std::uint64_t seed,
                                std::size_t word_cap = 400'000);

/// Net-count slope of an arbitrary sample (no resolution filter).
BoxCountFit net_count_dimension(const FiniteMetricSpace& space, const std::vector<double>& radii);

/// Analytic boundary Gromov products -log(|T_p^{-1} xi - T_p^{-1} eta| / 2).
BoundarySample analytic_boundary_sample(const GroupActionModel& model, const std::vector<Vec>& points);

struct TripleSeparation {
    Mobius g;
    double achieved = 0.0;     ///< min pairwise chordal distance of the images
    double input_min = 0.0;
    std::size_t words_searched = 0;
    std::size_t count_at_tau = 0;  ///< elements giving >= tau separation
};

TripleSeparation separate_triple(const GroupActionModel& model, const std::array<Vec, 3>& triple,
                                 std::size_t word_budget, double tau = 0.0);

struct RoughIsometryDefect {
    double lambda = 1.0;
    double k = 0.0;
};

/// (lambda, k) with d/lambda - k <= d' <= lambda d + k: lambda from the far
/// pairs (d >= far_fraction * max d), then the smallest k for that lambda.
RoughIsometryDefect rough_isometry_defect(const FiniteMetricSpace& source,
                                          const FiniteMetricSpace& target,
                                          double far_fraction = 0.5);

/// Points of H^2 in the disk with exact hyperbolic distances.
FiniteMetricSpace disk_space(const std::vector<cplx>& points, std::string label = "h2");

}  // namespace qmr
