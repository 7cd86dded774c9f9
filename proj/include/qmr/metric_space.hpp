#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qmr {

using Index = std::size_t;

/// How thoroughly the metric axioms are checked on construction.
enum class Validation {
    automatic,  ///< full below 400 points, sampled above
    full,       ///< every triple
    sampled,    ///< 200k seeded triples plus all pairs
    none,
};

/// A finite metric space stored as a dense symmetric distance matrix.
///
/// Points optionally carry real coordinates (used by generators and
/// plotting); the matrix is always the source of truth for distances.
/// The diameter is cached on construction.
class FiniteMetricSpace {
public:
    FiniteMetricSpace() = default;

    /// `dist` is row-major n x n. Throws ValidationError when the matrix is
    /// not a metric (see Validation for how much is checked).
    FiniteMetricSpace(std::size_t n, std::vector<double> dist, std::string label = {},
                      Validation validation = Validation::automatic,
                      std::vector<std::vector<double>> coords = {});

    /// Euclidean metric on a point cloud.
    static FiniteMetricSpace euclidean(std::vector<std::vector<double>> points,
                                       std::string label = {},
                                       Validation validation = Validation::automatic);

    std::size_t size() const { return n_; }
    double operator()(Index i, Index j) const { return dist_[i * n_ + j]; }
    std::span<const double> row(Index i) const { return {dist_.data() + i * n_, n_}; }
    const std::vector<double>& matrix() const { return dist_; }
    double diam() const { return diam_; }
    const std::string& label() const { return label_; }
    bool has_coords() const { return !coords_.empty(); }
    const std::vector<std::vector<double>>& coords() const { return coords_; }

    /// Multiplies every distance by `factor` > 0.
    FiniteMetricSpace scaled(double factor, std::string label = {}) const;

    /// Copy rescaled to diameter 1.
    FiniteMetricSpace normalized() const;

    /// Restriction to the listed points, in the listed order.
    FiniteMetricSpace subspace(std::span<const Index> points, std::string label = {}) const;

    /// Smallest distance between distinct points.
    double min_distance() const;

    /// Largest nearest-neighbour distance (the sampling mesh).
    double mesh() const;

private:
    void validate(Validation validation) const;

    std::size_t n_ = 0;
    std::vector<double> dist_;
    std::vector<std::vector<double>> coords_;
    std::string label_;
    double diam_ = 0.0;
};

/// Relative slack used by the triangle-inequality check (times the diameter).
inline constexpr double kTriangleTolerance = 1e-9;

}  // namespace qmr
