#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace qmr {

using Vec = std::vector<double>;

double norm(const Vec& v);
double dot(const Vec& a, const Vec& b);
double chordal(const Vec& a, const Vec& b);

/// (x_1..x_n, x_{n+1}) -> x'/(1 - x_{n+1}). Throws DomainError within 1e-12 of the pole.
Vec stereographic(const Vec& x);
/// Inverse: y -> (2y, |y|^2 - 1)/(|y|^2 + 1).
Vec inverse_stereographic(const Vec& y);

/// Reflection across the hyperplane orthogonal to a - b, sending unit a to unit b.
struct Householder {
    Vec u;  ///< unit normal; empty means identity
    static Householder mapping(const Vec& a, const Vec& b);
    Vec apply(const Vec& x) const;
};

struct StereoSweep {
    double delta = 0.0;
    std::size_t pairs = 0;
    double min_ratio = 0.0;  ///< fitted c1
    double max_ratio = 0.0;
    double c2 = 0.0;         ///< max_ratio * delta^2
};

/// Ratio |p(x) - p(y)| / |x - y| over random pairs on S^n outside the chordal
/// delta-cap at the north pole.
StereoSweep stereo_sweep(int n, double delta, std::size_t pairs, std::uint64_t seed);

/// Chordal balls B0, B1 of radius delta and an obstacle set E on S^n.
struct SphereConfig {
    int n = 2;
    Vec c0, c1;
    double delta = 0.1;
    std::vector<Vec> E;
};

/// Throws ConfigError when the hypotheses fail (checked with chordal triangle bounds).
void validate_config(const SphereConfig& config);

struct SphereCube {
    SphereConfig config;
    int n = 2;
    // Construction data in the projected frame.
    Householder to_pole;   ///< sends E[0] to the north pole
    Householder to_axis;   ///< in R^n, sends the centre direction to e_1
    Vec q0, q1;            ///< centres of p(B0), p(B1) (rotated frame)
    double rho0 = 0.0, rho1 = 0.0, cap_radius = 0.0, half_width = 0.0;

    /// [0,1]^n -> S^n.
    Vec operator()(const Vec& u) const;

    // Verification on a face sample.
    std::size_t samples_per_face = 0;
    double min_opposite_distance = 0.0;  ///< over all axes
    double fitted_c = 0.0;               ///< min_opposite_distance / delta^3
    bool faces_inside = true;            ///< C0 in B0 and C1 in B1
    bool avoids_cap = true;              ///< sampled S misses the delta-cap around E
    bool avoids_E = true;
};

/// Builds the cube via stereographic projection and checks its properties.
SphereCube cube_in_sphere(const SphereConfig& config, std::uint64_t seed,
                          std::size_t samples_per_face = 24);

/// Antipodal caps on the equator with E the north pole.
SphereConfig antipodal_config(int n, double delta);

}  // namespace qmr
