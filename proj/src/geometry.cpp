#include "falforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace falforge {

namespace {

// Snap threshold under which the leading coefficient of a normalized triple
// is treated as an exact line.
constexpr double kLineSnap = 1e-12;

} // namespace

cplx GeneralizedCircle::center() const {
    return -b / a;
}

double GeneralizedCircle::radius() const {
    return 1.0 / std::abs(a);
}

double GeneralizedCircle::value_at(cplx z) const {
    return a * std::norm(z) + 2.0 * std::real(std::conj(b) * z) + c;
}

GeneralizedCircle GeneralizedCircle::circle(cplx center, double radius, int orientation) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ValidationError("circle radius must be positive and finite");
    }
    GeneralizedCircle C;
    C.a = 1.0 / radius;
    C.b = -center / radius;
    C.c = (std::norm(center) - radius * radius) / radius;
    C.orientation = orientation;
    return C;
}

GeneralizedCircle GeneralizedCircle::line(cplx normal, double offset, int orientation) {
    double n = std::abs(normal);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ValidationError("line normal must be nonzero");
    }
    GeneralizedCircle C;
    C.a = 0.0;
    C.b = normal / n;
    C.c = offset / n;
    C.orientation = orientation;
    return C;
}

GeneralizedCircle GeneralizedCircle::from_coefficients(double a, cplx b, double c,
                                                       int orientation) {
    double m = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw ValidationError("degenerate circle coefficients");
    }
    // Rescale by the largest coefficient first; keeps the quadratic form
    // well conditioned for huge circles (a near 0).
    a /= m;
    b /= m;
    c /= m;
    double q = a * c - std::norm(b);
    if (!(q < 0.0) || !std::isfinite(q)) {
        throw ValidationError("coefficients do not describe a real circle or line");
    }
    double s = 1.0 / std::sqrt(-q);
    a *= s;
    b *= s;
    c *= s;
    GeneralizedCircle C;
    if (std::abs(a) < kLineSnap) {
        double nb = std::abs(b);
        C.a = 0.0;
        C.b = b / nb;
        C.c = c / nb;
        C.orientation = orientation;
    } else {
        int flip = a < 0.0 ? -1 : +1;
        C.a = flip * a;
        C.b = double(flip) * b;
        C.c = flip * c;
        C.orientation = flip * orientation;
    }
    return C;
}

MobiusMap MobiusMap::inversion_at(cplx p) {
    // z -> 1/(z - p), determinant-normalized: divide by sqrt(-1) = i.
    MobiusMap M;
    M.m11 = cplx{0, 0};
    M.m12 = cplx{0, -1};
    M.m21 = cplx{0, -1};
    M.m22 = cplx{0, 1} * p;
    return M;
}

MobiusMap MobiusMap::disk_translation(cplx x) {
    double d = 1.0 - std::norm(x);
    if (!(d > 0.0)) {
        throw ValidationError("disk translation target must lie in the open unit disk");
    }
    double s = 1.0 / std::sqrt(d);
    MobiusMap M;
    M.m11 = s;
    M.m12 = s * x;
    M.m21 = s * std::conj(x);
    M.m22 = s;
    return M;
}

MobiusMap MobiusMap::rotation(double phi) {
    MobiusMap M;
    M.m11 = std::polar(1.0, phi / 2.0);
    M.m22 = std::polar(1.0, -phi / 2.0);
    return M;
}

MobiusMap MobiusMap::euclidean_isometry(cplx a, cplx t) {
    double n = std::abs(a);
    if (!(n > 0.0)) throw ValidationError("euclidean isometry needs a nonzero rotation part");
    a /= n;
    cplx s = std::sqrt(a);
    MobiusMap M;
    M.m11 = a / s;
    M.m12 = t / s;
    M.m21 = cplx{0, 0};
    M.m22 = cplx{1, 0} / s;
    return M;
}

MobiusMap MobiusMap::normalized() const {
    cplx d = det();
    if (std::abs(d) < 1e-300) throw ValidationError("singular Moebius matrix");
    cplx s = std::sqrt(d);
    MobiusMap M = *this;
    M.m11 /= s;
    M.m12 /= s;
    M.m21 /= s;
    M.m22 /= s;
    return M;
}

MobiusMap MobiusMap::inverse() const {
    MobiusMap M;
    M.m11 = m22;
    M.m12 = -m12;
    M.m21 = -m21;
    M.m22 = m11;
    cplx d = det();
    M.m11 /= d;
    M.m12 /= d;
    M.m21 /= d;
    M.m22 /= d;
    return M;
}

Point MobiusMap::apply(Point p) const {
    if (p.infinite) {
        if (std::abs(m21) < 1e-14 * std::abs(m11)) return Point::at_infinity();
        return Point::finite(m11 / m21);
    }
    cplx num = m11 * p.z + m12;
    cplx den = m21 * p.z + m22;
    double scale = std::max(std::abs(m21) * std::abs(p.z), std::abs(m22));
    if (std::abs(den) < 1e-13 * std::max(scale, 1.0)) return Point::at_infinity();
    return Point::finite(num / den);
}

double MobiusMap::distance_from_identity() const {
    auto dev = [&](double sign) {
        return std::max({std::abs(sign * m11 - cplx{1, 0}), std::abs(sign * m12),
                         std::abs(sign * m21), std::abs(sign * m22 - cplx{1, 0})});
    };
    return std::min(dev(1.0), dev(-1.0));
}

MobiusMap compose(const MobiusMap& o, const MobiusMap& i) {
    MobiusMap M;
    M.m11 = o.m11 * i.m11 + o.m12 * i.m21;
    M.m12 = o.m11 * i.m12 + o.m12 * i.m22;
    M.m21 = o.m21 * i.m11 + o.m22 * i.m21;
    M.m22 = o.m21 * i.m12 + o.m22 * i.m22;
    return M;
}

double qform(const GeneralizedCircle& C) {
    return C.a * C.c - std::norm(C.b);
}

double qpolar(const GeneralizedCircle& C1, const GeneralizedCircle& C2) {
    return 0.5 * (C1.a * C2.c + C2.a * C1.c) - std::real(C1.b * std::conj(C2.b));
}

namespace {

void require_normalized(const GeneralizedCircle& C, double tol, const char* who) {
    double q = qform(C);
    if (std::abs(q + 1.0) > tol * 10.0) {
        std::ostringstream os;
        os << who << ": input not normalized, qform = " << q;
        throw ValidationError(os.str());
    }
    if (C.is_line() && std::abs(std::abs(C.b) - 1.0) > tol * 10.0) {
        throw ValidationError(std::string(who) + ": line normal not unit length");
    }
}

} // namespace

double inversive_product(const GeneralizedCircle& C1, const GeneralizedCircle& C2, double tol) {
    require_normalized(C1, tol, "inversive_product");
    require_normalized(C2, tol, "inversive_product");
    // Orientation-signed: the value depends on the selected disks, which makes
    // it a genuine Moebius invariant (coefficient renormalization may flip
    // signs, but it flips the orientation flag in tandem).
    return -double(C1.orientation * C2.orientation) * qpolar(C1, C2);
}

Point tangency_point(const GeneralizedCircle& C1, const GeneralizedCircle& C2, double tol) {
    double p = inversive_product(C1, C2, tol);
    double residual = std::abs(std::abs(p) - 1.0);
    if (residual > std::max(tol, 1e-7)) {
        std::ostringstream os;
        os << "tangency_point: circles not tangent, |product| - 1 = " << residual;
        throw ValidationError(os.str());
    }
    // The pencil C1 + lambda*C2 contains a unique point circle at
    // lambda = qpolar(C1, C2); its center is the tangency point.
    double lam = qpolar(C1, C2);
    double a = C1.a + lam * C2.a;
    cplx b = C1.b + lam * C2.b;
    double c = C1.c + lam * C2.c;
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale < 1e-10) {
        throw ValidationError("tangency_point: degenerate pencil (identical circles?)");
    }
    if (std::abs(a) < 1e-10 * scale) return Point::at_infinity();
    return Point::finite(-b / a);
}

Vec4 circle_vec(const GeneralizedCircle& C) {
    return {C.a, std::real(C.b), std::imag(C.b), C.c};
}

GeneralizedCircle circle_from_vec(const Vec4& v, int orientation) {
    return GeneralizedCircle::from_coefficients(v[0], cplx{v[1], v[2]}, v[3], orientation);
}

Vec4 qpolar_row(const GeneralizedCircle& C) {
    return {0.5 * C.c, -std::real(C.b), -std::imag(C.b), 0.5 * C.a};
}

namespace {

double dot4(const Vec4& x, const Vec4& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}

double det3(double a00, double a01, double a02, double a10, double a11, double a12, double a20,
            double a21, double a22) {
    return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
           a02 * (a10 * a21 - a11 * a20);
}

// Euclidean normal of span{r1, r2, r3} in R^4 by cofactor expansion.
Vec4 cross4(const Vec4& r1, const Vec4& r2, const Vec4& r3) {
    Vec4 n;
    n[0] = det3(r1[1], r1[2], r1[3], r2[1], r2[2], r2[3], r3[1], r3[2], r3[3]);
    n[1] = -det3(r1[0], r1[2], r1[3], r2[0], r2[2], r2[3], r3[0], r3[2], r3[3]);
    n[2] = det3(r1[0], r1[1], r1[3], r2[0], r2[1], r2[3], r3[0], r3[1], r3[3]);
    n[3] = -det3(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2]);
    return n;
}

double qform_vec(const Vec4& v) { return v[0] * v[3] - v[1] * v[1] - v[2] * v[2]; }
double qpolar_vec(const Vec4& x, const Vec4& y) {
    return 0.5 * (x[0] * y[3] + y[0] * x[3]) - x[1] * y[1] - x[2] * y[2];
}

} // namespace

GeneralizedCircle dual_circle(const GeneralizedCircle& c1, const GeneralizedCircle& c2,
                              const GeneralizedCircle& c3) {
    // Orthogonality to each input is linear: qpolar(X, ci) = 0. The solution
    // is G^{-1} applied to the Euclidean normal of the span of the inputs.
    Vec4 v1 = circle_vec(c1), v2 = circle_vec(c2), v3 = circle_vec(c3);
    Vec4 n = cross4(v1, v2, v3);
    double nn = std::sqrt(dot4(n, n));
    if (nn < 1e-12) {
        throw ValidationError("dual_circle: degenerate triple (coincident tangencies)");
    }
    // G^{-1} (a, br, bi, c) = (2c, -br, -bi, 2a).
    Vec4 d = {2.0 * n[3], -n[1], -n[2], 2.0 * n[0]};
    GeneralizedCircle D = circle_from_vec(d);
    D.orientation = +1; // no canonical side; select the bounded disk
    for (const auto* c : {&c1, &c2, &c3}) {
        if (std::abs(qpolar(D, *c)) > 1e-7) {
            throw ValidationError("dual_circle: triple is not pairwise tangent");
        }
    }
    return D;
}

GeneralizedCircle mobius_apply(const MobiusMap& Mraw, const GeneralizedCircle& C) {
    MobiusMap M = Mraw.normalized();
    MobiusMap N = M.inverse(); // acts on the Hermitian matrix by congruence
    // H = [[a, b], [conj(b), c]]; H' = N^dagger H N.
    cplx h00{C.a, 0.0}, h01 = C.b, h10 = std::conj(C.b), h11{C.c, 0.0};
    // T = H N
    cplx t00 = h00 * N.m11 + h01 * N.m21;
    cplx t01 = h00 * N.m12 + h01 * N.m22;
    cplx t10 = h10 * N.m11 + h11 * N.m21;
    cplx t11 = h10 * N.m12 + h11 * N.m22;
    // H' = N^dagger T
    cplx p00 = std::conj(N.m11) * t00 + std::conj(N.m21) * t10;
    cplx p01 = std::conj(N.m11) * t01 + std::conj(N.m21) * t11;
    cplx p10 = std::conj(N.m12) * t00 + std::conj(N.m22) * t10;
    cplx p11 = std::conj(N.m12) * t01 + std::conj(N.m22) * t11;
    double a2 = std::real(p00);
    cplx b2 = 0.5 * (p01 + std::conj(p10));
    double c2 = std::real(p11);
    GeneralizedCircle out = GeneralizedCircle::from_coefficients(a2, b2, c2);

    // Fix the orientation flag by transporting a sample point from the
    // selected side. Candidate samples avoid the pole of M.
    Point pole = Point::at_infinity();
    if (std::abs(M.m21) > 1e-14) pole = Point::finite(-M.m22 / M.m21);
    auto is_pole = [&](cplx z) {
        return !pole.infinite && std::abs(z - pole.z) < 1e-9 * (1.0 + std::abs(z));
    };
    std::vector<Point> candidates;
    if (!C.is_line()) {
        cplx z0 = C.center();
        double r = C.radius();
        if (C.orientation > 0) {
            candidates = {Point::finite(z0), Point::finite(z0 + 0.43 * r),
                          Point::finite(z0 + cplx{0, 0.43} * r), Point::finite(z0 - 0.37 * r)};
        } else {
            candidates = {Point::at_infinity(), Point::finite(z0 + 2.3 * r),
                          Point::finite(z0 + cplx{0, 3.1} * r), Point::finite(z0 - 4.7 * r)};
        }
    } else {
        cplx foot = -0.5 * C.c * C.b;
        cplx step = double(-C.orientation) * C.b;
        candidates = {Point::finite(foot + step), Point::finite(foot + step + cplx{0, 1} * C.b),
                      Point::finite(foot + 2.0 * step - cplx{0, 2} * C.b)};
    }
    for (const Point& s : candidates) {
        if (!s.infinite && is_pole(s.z)) continue;
        if (s.infinite && pole.infinite) continue;
        Point w = M.apply(s);
        double v;
        if (w.infinite) {
            v = out.a; // sign of the form at infinity
            if (out.is_line()) continue;
        } else {
            v = out.value_at(w.z);
        }
        if (std::abs(v) < 1e-13) continue; // too close to the locus, try next
        out.orientation = v < 0.0 ? +1 : -1;
        return out;
    }
    // All candidates degenerate; keep default orientation.
    return out;
}

MobiusMap normalize_to_infinity(const Point& p) {
    if (p.infinite) return MobiusMap::identity();
    return MobiusMap::inversion_at(p.z);
}

double locus_distance(const GeneralizedCircle& C, cplx z) {
    if (C.is_line()) {
        return std::abs(std::real(std::conj(C.b) * z) + 0.5 * C.c);
    }
    return std::abs(std::abs(z - C.center()) - C.radius());
}

std::vector<GeneralizedCircle> solve_circle_rows(const PlacementRow& r1, const PlacementRow& r2,
                                                 const PlacementRow& r3) {
    const Vec4& a1 = r1.row;
    const Vec4& a2 = r2.row;
    const Vec4& a3 = r3.row;
    // Particular solution X_p = A^T (A A^T)^{-1} t by Cramer on the 3x3 Gram.
    double g11 = dot4(a1, a1), g12 = dot4(a1, a2), g13 = dot4(a1, a3);
    double g22 = dot4(a2, a2), g23 = dot4(a2, a3), g33 = dot4(a3, a3);
    double D = det3(g11, g12, g13, g12, g22, g23, g13, g23, g33);
    if (std::abs(D) < 1e-18) {
        throw ValidationError("solve_circle_rows: dependent placement conditions");
    }
    double t1 = r1.rhs, t2 = r2.rhs, t3 = r3.rhs;
    double y1 = det3(t1, g12, g13, t2, g22, g23, t3, g23, g33) / D;
    double y2 = det3(g11, t1, g13, g12, t2, g23, g13, t3, g33) / D;
    double y3 = det3(g11, g12, t1, g12, g22, t2, g13, g23, t3) / D;
    Vec4 xp;
    for (int i = 0; i < 4; ++i) xp[i] = y1 * a1[i] + y2 * a2[i] + y3 * a3[i];
    Vec4 n = cross4(a1, a2, a3);

    // qform(xp + lambda n) = -1.
    double qa = qform_vec(n);
    double qb = 2.0 * qpolar_vec(xp, n);
    double qc = qform_vec(xp) + 1.0;
    std::vector<double> roots;
    if (std::abs(qa) < 1e-14 * (std::abs(qb) + std::abs(qc))) {
        if (std::abs(qb) > 1e-14) roots.push_back(-qc / qb);
    } else {
        double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            double sd = std::sqrt(disc);
            // Numerically stable pair of roots.
            double q = -0.5 * (qb + (qb >= 0 ? sd : -sd));
            roots.push_back(q / qa);
            if (std::abs(q) > 1e-300) roots.push_back(qc / q);
        }
    }
    std::vector<GeneralizedCircle> out;
    for (double lam : roots) {
        Vec4 x;
        for (int i = 0; i < 4; ++i) x[i] = xp[i] + lam * n[i];
        try {
            out.push_back(circle_from_vec(x));
        } catch (const ValidationError&) {
            // root did not give a real circle; skip
        }
    }
    return out;
}

} // namespace falforge
