#include "qmr/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmr/errors.hpp"
#include "qmr/rng.hpp"

namespace qmr {

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> dist, std::string label,
                                     Validation validation,
                                     std::vector<std::vector<double>> coords)
    : n_(n), dist_(std::move(dist)), coords_(std::move(coords)), label_(std::move(label)) {
    if (dist_.size() != n_ * n_) {
        throw ShapeError("distance matrix has " + std::to_string(dist_.size()) +
                         " entries, expected " + std::to_string(n_ * n_));
    }
    if (!coords_.empty() && coords_.size() != n_) {
        throw ShapeError("coordinate payload size does not match point count");
    }
    diam_ = 0.0;
    for (double d : dist_) diam_ = std::max(diam_, d);
    validate(validation);
}

FiniteMetricSpace FiniteMetricSpace::euclidean(std::vector<std::vector<double>> points,
                                               std::string label, Validation validation) {
    const std::size_t n = points.size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != points[0].size()) {
            throw ShapeError("point cloud has mixed dimensions");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                const double t = points[i][c] - points[j][c];
                s += t * t;
            }
            dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
        }
    }
    return FiniteMetricSpace(n, std::move(dist), std::move(label), validation, std::move(points));
}

void FiniteMetricSpace::validate(Validation validation) const {
    if (validation == Validation::none) return;
    for (std::size_t i = 0; i < n_; ++i) {
        if (dist_[i * n_ + i] != 0.0) {
            throw ValidationError("nonzero self-distance at point " + std::to_string(i));
        }
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double a = dist_[i * n_ + j];
            const double b = dist_[j * n_ + i];
            if (!std::isfinite(a) || a != b) {
                throw ValidationError("asymmetric or non-finite distance at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (!(a > 0.0)) {
                throw ValidationError("distinct points " + std::to_string(i) + " and " +
                                      std::to_string(j) + " at distance 0");
            }
        }
    }
    const double tol = kTriangleTolerance * diam_;
    auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
        if (dist_[i * n_ + k] > dist_[i * n_ + j] + dist_[j * n_ + k] + tol) {
            std::ostringstream os;
            os << "triangle inequality fails for (" << i << "," << j << "," << k << ")";
            throw ValidationError(os.str());
        }
    };
    const bool full = validation == Validation::full ||
                      (validation == Validation::automatic && n_ <= 400);
    if (full) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = i + 1; k < n_; ++k) check(i, j, k);
        return;
    }
    if (n_ < 3) return;
    Rng rng(0x5eed);
    for (int t = 0; t < 200000; ++t) {
        check(rng.index(n_), rng.index(n_), rng.index(n_));
    }
}

FiniteMetricSpace FiniteMetricSpace::scaled(double factor, std::string label) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw ParameterError("scale factor must be positive and finite");
    }
    std::vector<double> dist(dist_);
    for (double& d : dist) d *= factor;
    return FiniteMetricSpace(n_, std::move(dist), label.empty() ? label_ : std::move(label),
                             Validation::none, coords_);
}

FiniteMetricSpace FiniteMetricSpace::normalized() const {
    if (diam_ == 1.0 || n_ < 2) return *this;
    return scaled(1.0 / diam_);
}

FiniteMetricSpace FiniteMetricSpace::subspace(std::span<const Index> points,
                                              std::string label) const {
    const std::size_t m = points.size();
    std::vector<double> dist(m * m);
    std::vector<std::vector<double>> coords;
    for (std::size_t a = 0; a < m; ++a) {
        if (points[a] >= n_) throw ShapeError("subspace index out of range");
        for (std::size_t b = 0; b < m; ++b) dist[a * m + b] = (*this)(points[a], points[b]);
        if (!coords_.empty()) coords.push_back(coords_[points[a]]);
    }
    // Repeated indices would produce zero off-diagonal entries; let validation catch them
    // cheaply without re-running the triangle scan.
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (!(dist[a * m + b] > 0.0)) throw ShapeError("subspace repeats a point");
    return FiniteMetricSpace(m, std::move(dist), label.empty() ? label_ : std::move(label),
                             Validation::none, std::move(coords));
}

double FiniteMetricSpace::min_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) best = std::min(best, dist_[i * n_ + j]);
    return best;
}

double FiniteMetricSpace::mesh() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        const double* r = dist_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j)
            if (j != i) nearest = std::min(nearest, r[j]);
        if (n_ > 1) worst = std::max(worst, nearest);
    }
    return worst;
}

}  // namespace qmr
