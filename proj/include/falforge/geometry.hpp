#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "falforge/error.hpp"

namespace falforge {

using cplx = std::complex<double>;

/// Absolute tolerance used by geometric predicates on normalized coefficients.
inline constexpr double kGeomTol = 1e-9;

/// A point of the inversive plane: a finite complex coordinate or the point
/// at infinity, never both.
struct Point {
    cplx z{0.0, 0.0};
    bool infinite = false;

    static Point at_infinity() { return Point{cplx{0, 0}, true}; }
    static Point finite(cplx w) { return Point{w, false}; }
};

/// Circle or line in the inversive plane, stored as the coefficient triple
/// (a, b, c) of the locus
///
///     a*|z|^2 + 2*Re(conj(b)*z) + c = 0,
///
/// normalized so a*c - |b|^2 = -1. Proper circles have a > 0; lines have
/// a = 0 and |b| = 1 (b is the unit normal). The orientation flag selects
/// which complementary disk is "inside": a point p is inside when
/// orientation * value(p) < 0.
struct GeneralizedCircle {
    double a = 1.0;
    cplx b{0.0, 0.0};
    double c = -1.0;
    int orientation = +1;

    bool is_line() const { return a == 0.0; }
    cplx center() const;   // requires !is_line()
    double radius() const; // requires !is_line()

    /// Value of the defining form at a finite point.
    double value_at(cplx z) const;
    bool inside(cplx z) const { return orientation * value_at(z) < 0.0; }
    /// Whether the point at infinity lies on the selected side.
    bool inside_infinity() const { return orientation * a < 0.0 || (a == 0.0 && false); }

    static GeneralizedCircle circle(cplx center, double radius, int orientation = +1);
    /// Line { z : 2*Re(conj(normal)*z) + offset = 0 } with |normal| = 1.
    static GeneralizedCircle line(cplx normal, double offset, int orientation = +1);
    /// Normalize a raw coefficient triple. Throws ValidationError if the
    /// triple does not describe a real circle or line.
    static GeneralizedCircle from_coefficients(double a, cplx b, double c, int orientation = +1);
};

/// Orientation-preserving Moebius transformation z -> (m11 z + m12)/(m21 z + m22),
/// stored determinant-normalized.
struct MobiusMap {
    cplx m11{1, 0}, m12{0, 0}, m21{0, 0}, m22{1, 0};

    static MobiusMap identity() { return {}; }
    /// z -> 1/(z - p); sends p to infinity.
    static MobiusMap inversion_at(cplx p);
    /// Disk automorphism taking 0 to x (|x| < 1).
    static MobiusMap disk_translation(cplx x);
    /// Rotation about the origin by angle phi.
    static MobiusMap rotation(double phi);
    /// Euclidean isometry z -> a z + t with |a| = 1.
    static MobiusMap euclidean_isometry(cplx a, cplx t);

    MobiusMap normalized() const;
    MobiusMap inverse() const;
    cplx det() const { return m11 * m22 - m12 * m21; }
    Point apply(Point p) const;
    /// Max entry deviation from the identity, modulo the projective sign.
    double distance_from_identity() const;
};

MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner);

/// Quadratic form a*c - |b|^2 and its polarization. Normalized circles and
/// lines both have qform = -1.
double qform(const GeneralizedCircle& C);
double qpolar(const GeneralizedCircle& C1, const GeneralizedCircle& C2);

/// Inversive product of two normalized circles. Sign convention:
/// externally tangent -> -1, internally tangent -> +1, orthogonal -> 0.
/// Throws ValidationError if either input is not normalized within tol.
double inversive_product(const GeneralizedCircle& C1, const GeneralizedCircle& C2,
                         double tol = kGeomTol);

/// The common point of two tangent circles. Throws ValidationError carrying
/// the inversive-product residual when the inputs are not tangent.
Point tangency_point(const GeneralizedCircle& C1, const GeneralizedCircle& C2,
                     double tol = kGeomTol);

/// The unique circle through the three pairwise tangency points of a tangent
/// triple, orthogonal to all three inputs.
GeneralizedCircle dual_circle(const GeneralizedCircle& c1, const GeneralizedCircle& c2,
                              const GeneralizedCircle& c3);

/// Image circle under a Moebius transformation. Preserves inversive products.
GeneralizedCircle mobius_apply(const MobiusMap& M, const GeneralizedCircle& C);

/// A map sending p to infinity (identity if p is already infinite).
MobiusMap normalize_to_infinity(const Point& p);

/// Euclidean distance between a point and the circle locus; used by audits.
double locus_distance(const GeneralizedCircle& C, cplx z);

// ---------------------------------------------------------------------------
// Small linear-algebra helpers shared by the placement machinery. A circle is
// viewed as the 4-vector (a, Re b, Im b, c); rows express inversive-product
// conditions B(X, C) = rhs, which are linear in X.

using Vec4 = std::array<double, 4>;

Vec4 circle_vec(const GeneralizedCircle& C);
GeneralizedCircle circle_from_vec(const Vec4& v, int orientation = +1);

/// Row such that dot(row, X) == qpolar(X, C).
Vec4 qpolar_row(const GeneralizedCircle& C);

struct PlacementRow {
    Vec4 row;
    double rhs;
};

/// Solve three linear rows plus the normalization qform(X) = -1, returning
/// up to two circles. Used to place tangent circles with one metric
/// condition (known radius / horocycle / spherical radius).
std::vector<GeneralizedCircle> solve_circle_rows(const PlacementRow& r1, const PlacementRow& r2,
                                                 const PlacementRow& r3);

} // namespace falforge
