#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmr/metric_space.hpp"

namespace qmr {

/// Four pairwise distinct point indices (x1, x2, x3, x4).
struct Quadruple {
    std::array<Index, 4> idx{};

    Quadruple() = default;
    Quadruple(Index a, Index b, Index c, Index d);

    Index operator[](std::size_t k) const { return idx[k]; }
    /// (x2, x1, x3, x4); inverts the cross-ratio.
    Quadruple swap_first_two() const { return {idx[1], idx[0], idx[2], idx[3]}; }
    friend bool operator==(const Quadruple&, const Quadruple&) = default;
    friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

/// A maximal separated subset of some parent space.
struct Net {
    std::vector<Index> members;
    double separation = 0.0;
};

struct DistortionReport {
    std::string map_label;
    double linear_constant_C = 1.0;  ///< max over quadruples of cr(target)/cr(source)
    Quadruple worst_quadruple;
    std::uint64_t sample_count = 0;
    bool exhaustive = false;
};

struct RegularityFit {
    double dimension_alpha = 0.0;
    double constant_C = 1.0;
    /// (radius, net count), radii strictly decreasing.
    std::vector<std::pair<double, std::size_t>> scales;
    /// Least-squares slope of log count against -log radius.
    double fitted_slope = 0.0;
    /// |fitted_slope - alpha| within the tolerance the fit was run with.
    bool consistent = false;
};

/// d(x1,x3) d(x2,x4) / (d(x1,x4) d(x2,x3)).
double cross_ratio(const FiniteMetricSpace& space, const Quadruple& q);

/// Entrywise d^eps for eps in (0, 1]; the result is re-validated as a metric.
FiniteMetricSpace snowflake(const FiniteMetricSpace& space, double eps);

/// Greedy maximal separated set scanning `order` (a permutation of the points).
Net max_separated_net(const FiniteMetricSpace& space, double sep, std::span<const Index> order);

/// Greedy maximal separated set scanning a seeded shuffle of the points.
Net max_separated_net(const FiniteMetricSpace& space, double sep, std::uint64_t seed);

/// Greedy net over an implicit metric given by a distance callable.
std::vector<Index> greedy_net(std::size_t n, const std::function<double(Index, Index)>& dist,
                              double sep, std::span<const Index> order);

/// Seeded permutation of 0..n-1.
std::vector<Index> seeded_order(std::size_t n, std::uint64_t seed);

/// True when `net` is `separation`-separated and every point is within
/// `separation` of a member (exhaustive scan).
bool verify_net(const FiniteMetricSpace& space, const Net& net);

/// Strong quasi-Moebius distortion of the map i -> correspondence[i].
/// Exhaustive over ordered quadruples when their count is at most
/// min(budget, 10^6), otherwise a seeded sample of `budget` distinct quadruples.
DistortionReport qm_distortion(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                               std::span<const Index> correspondence,
                               std::uint64_t quadruple_budget, std::uint64_t seed,
                               std::string map_label = {});

/// Same, evaluated on an explicit quadruple list (used to compare maps on one sample).
DistortionReport qm_distortion_on(const FiniteMetricSpace& source,
                                  const FiniteMetricSpace& target,
                                  std::span<const Index> correspondence,
                                  std::span<const Quadruple> quadruples,
                                  std::string map_label = {});

/// Seeded sample of distinct ordered quadruples (exhaustive list when small).
std::vector<Quadruple> sample_quadruples(std::size_t n, std::uint64_t budget, std::uint64_t seed);

/// max over pairs of max(d_t/d_s, d_s/d_t).
double bilipschitz_distortion(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                              std::span<const Index> correspondence);

/// Ahlfors-regularity fit with net counts standing in for ball measures.
RegularityFit ahlfors_fit(const FiniteMetricSpace& space, double alpha,
                          std::vector<double> scale_grid, std::uint64_t seed = 0,
                          double slope_tolerance = 0.25);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Length of the shortest discrete step-path from i to j (edges join points at
/// distance <= step); nullopt when j is unreachable.
std::optional<std::size_t> min_delta_path(const FiniteMetricSpace& space, Index i, Index j,
                                          double step);

/// Hop distances from i to every point in the step graph (SIZE_MAX = unreachable).
std::vector<std::size_t> delta_path_lengths(const FiniteMetricSpace& space, Index i,
                                            double step);

}  // namespace qmr
