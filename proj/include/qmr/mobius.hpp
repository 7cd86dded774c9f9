#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qmr {

using cplx = std::complex<double>;

/// Element of PSL(2,C) stored as an SL(2,C) matrix with a canonical sign.
struct Mobius {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mobius identity() { return {}; }
    /// Scales to determinant 1 and fixes the sign (first nonzero of a, b, c, d
    /// has positive real part, or zero real part and positive imaginary part).
    Mobius canonical() const;
    Mobius inverse() const { return Mobius{d, -b, -c, a}; }
    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }
    double frobenius2() const { return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d); }

    /// Action on the Riemann sphere; nullopt stands for infinity.
    std::optional<cplx> apply(std::optional<cplx> z) const;
    /// Derivative modulus at a finite point with finite image.
    double derivative_abs(cplx z) const { return 1.0 / std::norm(c * z + d); }

    bool is_identity(double tol = 1e-9) const;
    friend Mobius operator*(const Mobius& x, const Mobius& y);
};

/// Max entrywise distance after sign canonicalization.
double matrix_distance(const Mobius& x, const Mobius& y);

/// Point of H^3 in the upper half-space: x + t j.
struct UpperPoint {
    cplx x{0.0};
    double t = 1.0;
};

UpperPoint act(const Mobius& g, const UpperPoint& p);
double h3_distance(const UpperPoint& p, const UpperPoint& q);
/// Ball-model coordinates of an upper half-space point (j maps to the origin).
std::array<double, 3> ball_coordinates(const UpperPoint& p);

/// Disk-model distance in H^2.
double h2_distance(cplx z, cplx w);

/// SU(1,1) element moving 0 to p (the disk translation T_p).
Mobius disk_translation_to(cplx p);
/// Translation of length ell along the geodesic through 0 in direction theta.
Mobius disk_translation(double ell, double theta = 0.0);
/// Rotation by theta about 0.
Mobius disk_rotation(double theta);
/// Conjugates an SL(2,R) element of the upper half-plane into the disk by the
/// Cayley map sending `p` to 0.
Mobius from_upper_half_plane(const Mobius& m, cplx p);

/// Chordal distance on S^2 between points of the Riemann sphere.
double riemann_chordal(std::optional<cplx> z, std::optional<cplx> w);

enum class ModelKind { h2_disk, h3_upper };

struct Circle {
    cplx centre;
    double radius;
};

/// Finitely generated Moebius action with a base point.
struct GroupActionModel {
    std::string name;
    ModelKind kind = ModelKind::h2_disk;
    std::vector<Mobius> generators;
    /// inverse_of[i] = index of the generator inverse to i.
    std::vector<std::size_t> inverse_of;
    cplx base_disk{0.0};  ///< H^2 base point in the disk
    UpperPoint base_upper;  ///< H^3 base point
    /// Side-pairing generators at the base (orbit pruning needs no margin).
    bool dirichlet = false;
    /// Isometric circles for Schottky presets (disk model).
    std::vector<Circle> circles;

    int boundary_dim() const { return kind == ModelKind::h2_disk ? 1 : 2; }
};

/// Throws ConfigError when a generator is the identity, a determinant is off,
/// an H^2 generator is not in SU(1,1), the list is not closed under inverses,
/// or the base point is outside the model.
void validate_model(GroupActionModel& model);

/// Distance from the base point to g(base).
double base_displacement(const GroupActionModel& model, const Mobius& g);

/// A model with the same generators and a different base point.
GroupActionModel with_base(const GroupActionModel& model, cplx base_disk);
GroupActionModel with_base(const GroupActionModel& model, UpperPoint base);

// Presets.
GroupActionModel psl2z_model();                      ///< base 2i in the upper half-plane
GroupActionModel cyclic_model(double ell);           ///< translation along the real diameter
GroupActionModel schottky_model(double s);           ///< four circles, half-angle s*pi/4
GroupActionModel genus2_model();                     ///< regular octagon side pairings
GroupActionModel schottky_from_circles(const std::vector<std::pair<Circle, Circle>>& pairs,
                                       cplx upper_base = cplx(0.0, 1.0));
GroupActionModel picard_model();                     ///< PSL(2, Z[i]) on H^3
GroupActionModel loxodromic_model(double ell, double twist);  ///< cyclic on H^3

/// Parses "psl2z", "cyclic:<ell>", "schottky:<s>", "genus2", "picard",
/// "loxodromic:<ell>[,<twist>]", or a matrix list "h2:..." / "h3:..." with
/// eight numbers (re, im of a, b, c, d) per generator separated by ';'.
GroupActionModel model_from_spec(const std::string& spec);

}  // namespace qmr
