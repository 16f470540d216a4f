#include "falforge/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

namespace falforge {

namespace {

constexpr double kPi = std::numbers::pi;

struct Corner {
    int u = -1, w = -1; // the other two vertices of a face incident to v
};

std::vector<std::vector<Corner>> vertex_corners(const Nerve& N) {
    std::vector<std::vector<Corner>> corners(N.vertex_count);
    for (const auto& tri : N.faces) {
        for (int k = 0; k < 3; ++k) {
            corners[tri[k]].push_back({tri[(k + 1) % 3], tri[(k + 2) % 3]});
        }
    }
    return corners;
}

double euclid_angle(double rv, double ru, double rw) {
    double s = std::sqrt((ru / (rv + ru)) * (rw / (rv + rw)));
    return 2.0 * std::asin(std::min(1.0, s));
}

// sinh(rn)/sinh(rv+rn), stable for large or infinite neighbor radius.
double sinh_ratio(double rn, double rv) {
    if (std::isinf(rn)) return std::exp(-rv);
    if (rn > 20.0) {
        double num = 1.0 - std::exp(-2.0 * rn);
        double den = 1.0 - std::exp(-2.0 * (rn + rv));
        return std::exp(-rv) * num / den;
    }
    return std::sinh(rn) / std::sinh(rv + rn);
}

double hyp_angle(double rv, double ru, double rw) {
    double s = std::sqrt(sinh_ratio(ru, rv) * sinh_ratio(rw, rv));
    return 2.0 * std::asin(std::min(1.0, s));
}

double sph_angle(double rv, double ru, double rw) {
    double b = rv + ru, c = rv + rw, a = ru + rw;
    double ca = (std::cos(a) - std::cos(b) * std::cos(c)) / (std::sin(b) * std::sin(c));
    return std::acos(std::clamp(ca, -1.0, 1.0));
}

double corner_angle(PackGeometry g, double rv, double ru, double rw) {
    switch (g) {
        case PackGeometry::euclidean: return euclid_angle(rv, ru, rw);
        case PackGeometry::hyperbolic: return hyp_angle(rv, ru, rw);
        case PackGeometry::sphere: return sph_angle(rv, ru, rw);
    }
    return 0.0;
}

double vertex_theta(PackGeometry g, const std::vector<std::vector<Corner>>& corners,
                    const std::vector<double>& r, int v) {
    double t = 0.0;
    for (const Corner& c : corners[v]) t += corner_angle(g, r[v], r[c.u], r[c.w]);
    return t;
}

// --------------------------------------------------------------------------
// Radii iteration. Uniform-neighbor updates swept Gauss-Seidel style, with a
// superstep extrapolation when the per-sweep contraction ratio is stable, and
// a bisection fallback per vertex (theta is strictly decreasing in r).

double cs_update_euclidean(double theta, int k, double r) {
    double beta = std::sin(theta / (2.0 * k));
    beta = std::min(beta, 1.0 - 1e-12);
    double delta = std::sin(kPi / k);
    double rhat = beta / (1.0 - beta) * r;
    return (1.0 - delta) / delta * rhat;
}

double cs_update_hyperbolic(double theta, int k, double r) {
    double beta = std::sin(theta / (2.0 * k));
    double delta = std::sin(kPi / k);
    double den = 1.0 - beta * std::cosh(r);
    double rhat;
    if (den > 1e-12) {
        double t = beta * std::sinh(r) / den;
        rhat = (t > 0.0 && t < 1.0) ? std::atanh(t) : 25.0;
    } else {
        rhat = 25.0;
    }
    double rn = std::asinh(std::sinh(rhat) / delta) - rhat;
    if (!std::isfinite(rn)) return r;
    return std::clamp(rn, 1e-12, 50.0);
}

double bisect_vertex(PackGeometry g, const std::vector<std::vector<Corner>>& corners,
                     std::vector<double>& r, int v) {
    double lo = 1e-12, hi = (g == PackGeometry::euclidean) ? 1e12 : 60.0;
    for (int it = 0; it < 200; ++it) {
        double mid = (g == PackGeometry::euclidean) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        r[v] = mid;
        double t = vertex_theta(g, corners, r, v);
        (t > 2.0 * kPi ? lo : hi) = mid;
    }
    return (g == PackGeometry::euclidean) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
}

struct IterationResult {
    long sweeps = 0;
    double residual = 0.0;
    std::vector<double> trace;
};

IterationResult iterate_label(PackGeometry g, const Nerve& N,
                              const std::vector<std::vector<Corner>>& corners,
                              std::vector<double>& r, const std::vector<char>& solve_mask,
                              const SolveOptions& opts, double target_tol) {
    auto resid = [&](const std::vector<double>& rr) {
        double worst = 0.0;
        for (int v = 0; v < N.vertex_count; ++v) {
            if (!solve_mask[v]) continue;
            double t = 0.0;
            for (const Corner& c : corners[v]) t += corner_angle(g, rr[v], rr[c.u], rr[c.w]);
            worst = std::max(worst, std::abs(t - 2.0 * kPi));
        }
        return worst;
    };

    auto renormalize = [&]() {
        if (g != PackGeometry::euclidean) return;
        double s = 0.0;
        int n = 0;
        for (int v = 0; v < N.vertex_count; ++v) {
            if (solve_mask[v]) {
                s += std::log(r[v]);
                ++n;
            }
        }
        double scale = std::exp(-s / std::max(1, n));
        for (int v = 0; v < N.vertex_count; ++v) {
            if (solve_mask[v]) r[v] *= scale;
        }
    };

    IterationResult out;
    renormalize();
    double res = resid(r);
    std::vector<double> prev_delta;
    std::vector<double> r_before;
    double prev_norm = 0.0;
    long stall = 0;
    bool bisect_mode = false;
    double best = res;

    while (res > target_tol) {
        if (out.sweeps >= opts.max_sweeps) {
            out.residual = res;
            std::ostringstream os;
            os << "packing iteration exhausted " << opts.max_sweeps
               << " sweeps, residual = " << res;
            throw ConvergenceError(os.str(), out.trace);
        }
        r_before = r;
        for (int v = 0; v < N.vertex_count; ++v) {
            if (!solve_mask[v]) continue;
            int k = static_cast<int>(corners[v].size());
            double theta = vertex_theta(g, corners, r, v);
            double rn;
            if (bisect_mode) {
                rn = bisect_vertex(g, corners, r, v);
            } else if (g == PackGeometry::euclidean) {
                rn = cs_update_euclidean(theta, k, r[v]);
            } else {
                rn = cs_update_hyperbolic(theta, k, r[v]);
            }
            if (std::isfinite(rn) && rn > 0.0) r[v] = rn;
        }
        renormalize();
        ++out.sweeps;
        res = resid(r);
        out.trace.push_back(res);
        if (out.trace.size() > 12) out.trace.erase(out.trace.begin());

        // Superstep: extrapolate along the sweep displacement when the
        // contraction ratio looks stable.
        std::vector<double> delta(r.size(), 0.0);
        double dn = 0.0;
        for (size_t i = 0; i < r.size(); ++i) {
            delta[i] = r[i] - r_before[i];
            dn += delta[i] * delta[i];
        }
        dn = std::sqrt(dn);
        if (prev_norm > 0.0 && dn > 0.0) {
            double lam = dn / prev_norm;
            if (lam > 0.05 && lam < 0.95) {
                double f = lam / (1.0 - lam);
                std::vector<double> cand = r;
                bool ok = true;
                for (size_t i = 0; i < r.size(); ++i) {
                    cand[i] += f * delta[i];
                    if (!(cand[i] > 0.0) || !std::isfinite(cand[i])) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    double cres = resid(cand);
                    if (cres < res) {
                        r = cand;
                        renormalize();
                        res = resid(r);
                    }
                }
            }
        }
        prev_norm = dn;
        prev_delta = delta;

        if (res < best * 0.999) {
            best = res;
            stall = 0;
        } else if (++stall > 60 && !bisect_mode) {
            bisect_mode = true; // uniform-neighbor steps stopped contracting
            stall = 0;
        } else if (stall > 400) {
            out.residual = res;
            throw ConvergenceError("packing iteration stalled, residual = " + std::to_string(res),
                                   out.trace);
        }
    }
    out.residual = res;
    return out;
}

// --------------------------------------------------------------------------
// Plane / disk development.

PlacementRow tangency_row(const GeneralizedCircle& C) { return {qpolar_row(C), 1.0}; }

PlacementRow euclid_radius_row(double r) { return {{1.0, 0.0, 0.0, 0.0}, 1.0 / r}; }

PlacementRow disk_radius_row(double rho) {
    GeneralizedCircle unit = GeneralizedCircle::circle(cplx{0, 0}, 1.0);
    double rhs = std::isinf(rho) ? -1.0 : -1.0 / std::tanh(rho);
    return {qpolar_row(unit), rhs};
}

double cross2(cplx p, cplx q) { return std::imag(std::conj(p) * q); }

// Third circle of a positively oriented triple: tangent to A and B, metric
// condition from `metric`, center on the left of A->B.
GeneralizedCircle place_circle(const GeneralizedCircle& A, const GeneralizedCircle& B,
                               const PlacementRow& metric) {
    auto sols = solve_circle_rows(tangency_row(A), tangency_row(B), metric);
    const GeneralizedCircle* best = nullptr;
    double best_cross = -1e300;
    for (const auto& S : sols) {
        if (S.is_line()) continue;
        double cr = cross2(B.center() - A.center(), S.center() - A.center());
        if (cr > best_cross) {
            best_cross = cr;
            best = &S;
        }
    }
    if (!best || !(best_cross > 0.0)) {
        throw AuditError("development: no admissible third circle", "placement");
    }
    return *best;
}

// Second circle of a seed face, gauged to the real axis.
GeneralizedCircle place_second(const GeneralizedCircle& first, bool first_horo,
                               const PlacementRow& metric) {
    PlacementRow gauge{{0.0, 0.0, 1.0, 0.0}, 0.0}; // Im b = 0
    auto sols = solve_circle_rows(tangency_row(first), metric, gauge);
    const GeneralizedCircle* best = nullptr;
    for (const auto& S : sols) {
        if (S.is_line()) continue;
        if (!best) {
            best = &S;
            continue;
        }
        bool left = S.center().real() < best->center().real();
        if (first_horo ? left : !left) best = &S;
    }
    if (!best) throw AuditError("development: no admissible second circle", "placement");
    return *best;
}

double vec_dist(const GeneralizedCircle& A, const GeneralizedCircle& B) {
    Vec4 a = circle_vec(A), b = circle_vec(B);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

struct DiskDevelopment {
    std::vector<GeneralizedCircle> canonical;                    // per vertex
    std::vector<std::array<GeneralizedCircle, 3>> face_circles;  // per face (active only)
    std::vector<char> face_active;
    double max_closure = 0.0; // re-derivation mismatch on cycle-closing faces
    std::vector<std::pair<int, double>> wraps; // face, mismatch (genus >= 1 cuts)
};

// Breadth-first development over `active` faces. `geom` is euclidean or
// hyperbolic (unit-disk model); hyperbolic radii may be +inf (horocycles).
DiskDevelopment develop_disk(const Nerve& N, const NerveTopology& T, PackGeometry geom,
                             const std::vector<double>& radii, const std::vector<char>& active) {
    auto metric_row = [&](int v) {
        return geom == PackGeometry::euclidean ? euclid_radius_row(radii[v])
                                               : disk_radius_row(radii[v]);
    };
    auto seed_pair = [&](int v0, int v1) -> std::pair<GeneralizedCircle, GeneralizedCircle> {
        if (geom == PackGeometry::euclidean) {
            return {GeneralizedCircle::circle(cplx{0, 0}, radii[v0]),
                    GeneralizedCircle::circle(cplx{radii[v0] + radii[v1], 0}, radii[v1])};
        }
        bool h0 = std::isinf(radii[v0]);
        bool h1 = std::isinf(radii[v1]);
        GeneralizedCircle first = h0 ? GeneralizedCircle::circle(cplx{0.5, 0}, 0.5)
                                     : GeneralizedCircle::circle(cplx{0, 0},
                                                                 std::tanh(radii[v0] / 2.0));
        if (!h0 && !h1) {
            double x = std::tanh((radii[v0] + radii[v1]) / 2.0);
            GeneralizedCircle at_origin =
                GeneralizedCircle::circle(cplx{0, 0}, std::tanh(radii[v1] / 2.0));
            return {first, mobius_apply(MobiusMap::disk_translation(cplx{x, 0}), at_origin)};
        }
        return {first, place_second(first, h0, metric_row(v1))};
    };

    DiskDevelopment D;
    D.face_active = active;
    D.canonical.resize(N.vertex_count);
    std::vector<char> placed(N.vertex_count, 0);
    D.face_circles.resize(N.faces.size());
    std::vector<char> done(N.faces.size(), 0);

    int seed = -1;
    for (size_t f = 0; f < N.faces.size(); ++f) {
        if (active[f]) {
            seed = static_cast<int>(f);
            break;
        }
    }
    if (seed < 0) throw ValidationError("development: no active faces");

    {
        const auto& tri = N.faces[seed];
        auto [c0, c1] = seed_pair(tri[0], tri[1]);
        GeneralizedCircle c2 = place_circle(c0, c1, metric_row(tri[2]));
        D.face_circles[seed] = {c0, c1, c2};
        for (int k = 0; k < 3; ++k) {
            D.canonical[tri[k]] = D.face_circles[seed][k];
            placed[tri[k]] = 1;
        }
        done[seed] = 1;
    }

    std::queue<int> q;
    q.push(seed);
    while (!q.empty()) {
        int f = q.front();
        q.pop();
        for (int k = 0; k < 3; ++k) {
            int e = T.face_edges[f][k];
            int g = T.other_face(e, f);
            if (g < 0 || !active[g] || done[g]) continue;
            // Shared edge endpoints, taken from f's chart.
            int u = T.edges[e][0], v = T.edges[e][1];
            auto slot_of = [&](int face, int vert) {
                for (int s = 0; s < 3; ++s) {
                    if (N.faces[face][s] == vert) return s;
                }
                throw ValidationError("development: vertex not in face");
            };
            GeneralizedCircle cu = D.face_circles[f][slot_of(f, u)];
            GeneralizedCircle cv = D.face_circles[f][slot_of(f, v)];
            const auto& tri = N.faces[g];
            int kw = -1;
            for (int s = 0; s < 3; ++s) {
                if (tri[s] != u && tri[s] != v) kw = s;
            }
            int w = tri[kw];
            // Order the placed pair by g's cyclic order so the new center
            // lands on the correct side.
            int a = tri[(kw + 1) % 3], b = tri[(kw + 2) % 3];
            const GeneralizedCircle& ca = (a == u) ? cu : cv;
            const GeneralizedCircle& cb = (b == u) ? cu : cv;
            GeneralizedCircle cw = place_circle(ca, cb, metric_row(w));
            D.face_circles[g] = {GeneralizedCircle{}, GeneralizedCircle{}, GeneralizedCircle{}};
            D.face_circles[g][slot_of(g, u)] = cu;
            D.face_circles[g][slot_of(g, v)] = cv;
            D.face_circles[g][kw] = cw;
            if (!placed[w]) {
                D.canonical[w] = cw;
                placed[w] = 1;
            } else {
                double mis = vec_dist(cw, D.canonical[w]);
                if (mis < 1e-6) {
                    D.max_closure = std::max(D.max_closure, mis);
                } else {
                    D.wraps.push_back({g, mis});
                }
            }
            done[g] = 1;
            q.push(g);
        }
    }
    for (size_t f = 0; f < N.faces.size(); ++f) {
        if (active[f] && !done[f]) {
            throw ValidationError("development: active face region is disconnected");
        }
    }
    return D;
}

// --------------------------------------------------------------------------
// Sphere development (unit vectors + angular radii), then conversion to
// plane circles through the standard projection sending the south pole to 0.

using V3 = std::array<double, 3>;

V3 v3sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
V3 v3scale(const V3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double v3dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
V3 v3cross(const V3& a, const V3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
V3 v3normalize(const V3& a) {
    double n = std::sqrt(v3dot(a, a));
    return v3scale(a, 1.0 / n);
}

V3 place_cap(const V3& A, const V3& B, double d_ab, double d_aw, double d_bw) {
    double ca = (std::cos(d_bw) - std::cos(d_ab) * std::cos(d_aw)) /
                (std::sin(d_ab) * std::sin(d_aw));
    double alpha = std::acos(std::clamp(ca, -1.0, 1.0));
    V3 e1 = v3normalize(v3sub(B, v3scale(A, v3dot(A, B))));
    V3 e2 = v3cross(A, e1);
    V3 dir{std::cos(alpha) * e1[0] + std::sin(alpha) * e2[0],
           std::cos(alpha) * e1[1] + std::sin(alpha) * e2[1],
           std::cos(alpha) * e1[2] + std::sin(alpha) * e2[2]};
    V3 W{std::cos(d_aw) * A[0] + std::sin(d_aw) * dir[0],
         std::cos(d_aw) * A[1] + std::sin(d_aw) * dir[1],
         std::cos(d_aw) * A[2] + std::sin(d_aw) * dir[2]};
    return v3normalize(W);
}

GeneralizedCircle cap_to_circle(const V3& m, double rho) {
    double s = std::sin(rho);
    double a = (std::cos(rho) - m[2]) / s;
    cplx b{-m[0] / s, -m[1] / s};
    double c = (std::cos(rho) + m[2]) / s;
    return GeneralizedCircle::from_coefficients(a, b, c, +1);
}

double circle_to_cap_radius(const GeneralizedCircle& C) {
    double ac = C.a + C.c;
    double co = C.orientation * ac / std::hypot(ac, 2.0);
    return std::acos(std::clamp(co, -1.0, 1.0));
}

V3 circle_to_cap_center(const GeneralizedCircle& C) {
    double n = std::hypot(C.a + C.c, 2.0);
    double f = -double(C.orientation) / n;
    return {f * 2.0 * std::real(C.b), f * 2.0 * std::imag(C.b), f * (C.a - C.c)};
}

// Conformal barycenter of boundary points: the unique c in the unit ball
// where the pushed-forward point average vanishes. Found by minimizing the
// proper convex-style energy
//   E(c) = sum_i log(1 - 2<x_i,c> + |c|^2) - n log(1 - |c|^2)
// whose gradient is -2/(1-|c|^2) times the pushed average.
V3 conformal_barycenter(const std::vector<V3>& pts) {
    auto energy = [&](const V3& c) {
        double cc = v3dot(c, c);
        double e = -static_cast<double>(pts.size()) * std::log(1.0 - cc);
        for (const auto& x : pts) e += std::log(1.0 - 2.0 * v3dot(x, c) + cc);
        return e;
    };
    auto gradient = [&](const V3& c) {
        double cc = v3dot(c, c);
        V3 g{0, 0, 0};
        for (const auto& x : pts) {
            double D = 1.0 - 2.0 * v3dot(x, c) + cc;
            for (int k = 0; k < 3; ++k) g[k] += 2.0 * (c[k] - x[k]) / D;
        }
        double f = 2.0 * static_cast<double>(pts.size()) / (1.0 - cc);
        for (int k = 0; k < 3; ++k) g[k] += f * c[k];
        return g;
    };
    V3 c{0, 0, 0};
    double E = energy(c);
    for (int it = 0; it < 500; ++it) {
        V3 g = gradient(c);
        double gn = std::sqrt(v3dot(g, g));
        if (gn < 1e-13 * (1.0 + static_cast<double>(pts.size()))) break;
        double t = 0.25 / static_cast<double>(pts.size());
        for (int bt = 0; bt < 60; ++bt) {
            V3 cand{c[0] - t * g[0], c[1] - t * g[1], c[2] - t * g[2]};
            if (v3dot(cand, cand) < 0.9999) {
                double Ec = energy(cand);
                if (Ec < E - 1e-4 * t * gn * gn) {
                    c = cand;
                    E = Ec;
                    break;
                }
            }
            t *= 0.5;
        }
    }
    return c;
}

struct Cap {
    V3 m;
    double rho;
};

// Image of a cap under the sphere Moebius boost with repelling pole u and
// rapidity d (the boundary action of the ball isometry moving tanh(d/2)*u to
// the origin). The boost preserves the great circle through u and the cap
// axis, where it acts by tan(theta'/2) = e^d tan(theta/2); the image cap is
// read off the two extreme boundary points. No large intermediates.
Cap boost_cap(const Cap& cap, const V3& u, double d) {
    double ca = std::clamp(v3dot(u, cap.m), -1.0, 1.0);
    double alpha = std::acos(ca);
    V3 e = v3sub(cap.m, v3scale(u, ca));
    double en = std::sqrt(v3dot(e, e));
    if (en > 1e-14) {
        e = v3scale(e, 1.0 / en);
    } else {
        // cap centered on the axis; any orthogonal direction works
        V3 probe = std::abs(u[0]) < 0.9 ? V3{1, 0, 0} : V3{0, 1, 0};
        e = v3normalize(v3sub(probe, v3scale(u, v3dot(u, probe))));
    }
    auto f01 = [&](double phi) { // angle from u in [0, pi]
        return 2.0 * std::atan2(std::exp(d) * std::sin(phi / 2.0), std::cos(phi / 2.0));
    };
    auto F = [&](double phi) { // odd periodic extension to [-pi, 2pi]
        if (phi < 0.0) return -f01(-phi);
        if (phi <= kPi) return f01(phi);
        return 2.0 * kPi - f01(2.0 * kPi - phi);
    };
    double a = F(alpha - cap.rho);
    double b = F(alpha + cap.rho);
    double alpha2 = 0.5 * (a + b);
    double rho2 = 0.5 * (b - a);
    Cap out;
    out.rho = rho2;
    out.m = V3{std::cos(alpha2) * u[0] + std::sin(alpha2) * e[0],
               std::cos(alpha2) * u[1] + std::sin(alpha2) * e[1],
               std::cos(alpha2) * u[2] + std::sin(alpha2) * e[2]};
    return out;
}

// Moebius-center the configuration: make the cap centers average to the
// origin of R^3. Keeps the label's spherical radii away from degenerate
// gauges.
void balance_caps(std::vector<Cap>& caps) {
    double norm = 1.0;
    for (int round = 0; round < 200; ++round) {
        std::vector<V3> centers;
        centers.reserve(caps.size());
        V3 mean{0, 0, 0};
        for (const auto& c : caps) {
            centers.push_back(c.m);
            for (int k = 0; k < 3; ++k) mean[k] += c.m[k] / static_cast<double>(caps.size());
        }
        norm = std::sqrt(v3dot(mean, mean));
        if (norm < 1e-12) return;
        V3 c = conformal_barycenter(centers);
        double cn = std::sqrt(v3dot(c, c));
        if (cn < 1e-15) break;
        double d = 2.0 * std::atanh(std::min(cn, 1.0 - 1e-15));
        V3 u = v3scale(c, 1.0 / cn);
        for (auto& cap : caps) cap = boost_cap(cap, u, d);
    }
    if (norm > 1e-6) {
        throw ConvergenceError("sphere gauge balancing did not converge", {norm});
    }
}

struct SphereDevelopment {
    std::vector<GeneralizedCircle> canonical;
    double max_closure = 0.0;
};

SphereDevelopment develop_sphere(const Nerve& N, const NerveTopology& T,
                                 const std::vector<double>& rho) {
    std::vector<V3> center(N.vertex_count);
    std::vector<char> placed(N.vertex_count, 0);
    std::vector<char> done(N.faces.size(), 0);
    SphereDevelopment D;

    const auto& tri0 = N.faces[0];
    center[tri0[0]] = {0, 0, 1};
    double d01 = rho[tri0[0]] + rho[tri0[1]];
    center[tri0[1]] = {std::sin(d01), 0, std::cos(d01)};
    center[tri0[2]] = place_cap(center[tri0[0]], center[tri0[1]], d01,
                                rho[tri0[0]] + rho[tri0[2]], rho[tri0[1]] + rho[tri0[2]]);
    placed[tri0[0]] = placed[tri0[1]] = placed[tri0[2]] = 1;
    done[0] = 1;

    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
        int f = q.front();
        q.pop();
        for (int k = 0; k < 3; ++k) {
            int e = T.face_edges[f][k];
            int g = T.other_face(e, f);
            if (done[g]) continue;
            const auto& tri = N.faces[g];
            int kw = -1;
            for (int s = 0; s < 3; ++s) {
                int u = T.edges[e][0], v = T.edges[e][1];
                if (tri[s] != u && tri[s] != v) kw = s;
            }
            int w = tri[kw];
            int a = tri[(kw + 1) % 3], b = tri[(kw + 2) % 3];
            V3 W = place_cap(center[a], center[b], rho[a] + rho[b], rho[a] + rho[w],
                             rho[b] + rho[w]);
            if (!placed[w]) {
                center[w] = W;
                placed[w] = 1;
            } else {
                V3 d = v3sub(W, center[w]);
                D.max_closure = std::max(D.max_closure, std::sqrt(v3dot(d, d)));
            }
            done[g] = 1;
            q.push(g);
        }
    }
    D.canonical.resize(N.vertex_count);
    for (int v = 0; v < N.vertex_count; ++v) D.canonical[v] = cap_to_circle(center[v], rho[v]);
    return D;
}

// Hyperbolic center of a circle drawn in the unit-disk model.
cplx disk_hyperbolic_center(const GeneralizedCircle& C) {
    cplx ec = C.center();
    double er = C.radius();
    double d = std::abs(ec);
    if (d < 1e-15) return cplx{0, 0};
    cplx dir = ec / d;
    double lo = d - er, hi = d + er;
    double m = std::tanh(0.5 * (std::atanh(lo) + std::atanh(hi)));
    return m * dir;
}

MobiusMap fit_transition(PackGeometry geom, const GeneralizedCircle& pu,
                         const GeneralizedCircle& pv, const GeneralizedCircle& qu,
                         const GeneralizedCircle& qv) {
    if (geom == PackGeometry::euclidean) {
        cplx a = (qv.center() - qu.center()) / (pv.center() - pu.center());
        a /= std::abs(a);
        cplx t = qu.center() - a * pu.center();
        return MobiusMap::euclidean_isometry(a, t);
    }
    // unit-disk isometry
    cplx p1 = disk_hyperbolic_center(pu), p2 = disk_hyperbolic_center(pv);
    cplx q1 = disk_hyperbolic_center(qu), q2 = disk_hyperbolic_center(qv);
    cplx u = (p2 - p1) / (cplx{1, 0} - std::conj(p1) * p2);
    cplx v = (q2 - q1) / (cplx{1, 0} - std::conj(q1) * q2);
    double phi = std::arg(v) - std::arg(u);
    return compose(compose(MobiusMap::disk_translation(q1), MobiusMap::rotation(phi)),
                   MobiusMap::disk_translation(p1).inverse());
}

} // namespace

const char* to_string(PackGeometry g) {
    switch (g) {
        case PackGeometry::euclidean: return "euclidean";
        case PackGeometry::hyperbolic: return "hyperbolic";
        case PackGeometry::sphere: return "sphere";
    }
    return "?";
}

std::optional<PackGeometry> geometry_from_string(const std::string& s) {
    if (s == "euclidean") return PackGeometry::euclidean;
    if (s == "hyperbolic") return PackGeometry::hyperbolic;
    if (s == "sphere") return PackGeometry::sphere;
    return std::nullopt;
}

PackGeometry natural_geometry(int genus) {
    if (genus == 0) return PackGeometry::sphere;
    if (genus == 1) return PackGeometry::euclidean;
    return PackGeometry::hyperbolic;
}

double angle_sum(const Nerve& N, const PackingLabel& L, int v) {
    if (v < 0 || v >= N.vertex_count) throw ValidationError("angle_sum: vertex out of range");
    if (static_cast<int>(L.radii.size()) != N.vertex_count) {
        throw ValidationError("angle_sum: label size does not match nerve");
    }
    auto corners = vertex_corners(N);
    if (corners[v].empty()) throw ValidationError("angle_sum: vertex has no incident faces");
    return vertex_theta(L.geometry, corners, L.radii, v);
}

double angle_sum_residual(const Nerve& N, const PackingLabel& L) {
    auto corners = vertex_corners(N);
    double worst = 0.0;
    for (int v = 0; v < N.vertex_count; ++v) {
        worst = std::max(worst, std::abs(vertex_theta(L.geometry, corners, L.radii, v) - 2.0 * kPi));
    }
    return worst;
}

SolveResult solve_packing_label(const Nerve& N, PackGeometry geometry, const SolveOptions& opts) {
    NerveTopology T = analyze_nerve(N);
    if (geometry != natural_geometry(T.genus)) {
        std::ostringstream os;
        os << "geometry '" << to_string(geometry) << "' incompatible with genus " << T.genus;
        throw ValidationError(os.str());
    }
    for (int v = 0; v < N.vertex_count; ++v) {
        if (T.vertex_degree[v] < 3) {
            throw ValidationError("nerve has a vertex of degree < 3; not packable");
        }
    }
    auto corners = vertex_corners(N);

    std::vector<double> r(N.vertex_count, 1.0);
    if (opts.initial_radii) {
        if (static_cast<int>(opts.initial_radii->size()) != N.vertex_count) {
            throw ValidationError("initial radii size mismatch");
        }
        r = *opts.initial_radii;
        for (double x : r) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw ValidationError("initial radii must be positive and finite");
            }
        }
    }

    SolveResult out;
    if (geometry == PackGeometry::euclidean || geometry == PackGeometry::hyperbolic) {
        std::vector<char> mask(N.vertex_count, 1);
        IterationResult it = iterate_label(geometry, N, corners, r, mask, opts, opts.tol);
        out.label = {geometry, r};
        out.stats.sweeps = it.sweeps;
        out.stats.residual = angle_sum_residual(N, out.label);
        out.stats.residual_trace = it.trace;
        return out;
    }

    // Genus 0: remove the most connected vertex, solve the disk
    // boundary-value problem with horocycles along its link, then read the
    // spherical radii off the developed configuration plus the outer circle.
    int apex = 0;
    for (int v = 1; v < N.vertex_count; ++v) {
        if (T.vertex_degree[v] > T.vertex_degree[apex]) apex = v;
    }
    std::vector<char> boundary(N.vertex_count, 0);
    for (const auto& e : T.edges) {
        if (e[0] == apex) boundary[e[1]] = 1;
        if (e[1] == apex) boundary[e[0]] = 1;
    }
    std::vector<char> mask(N.vertex_count, 0);
    std::vector<std::vector<Corner>> bvp_corners(N.vertex_count);
    for (const auto& tri : N.faces) {
        if (tri[0] == apex || tri[1] == apex || tri[2] == apex) continue;
        for (int k = 0; k < 3; ++k) {
            bvp_corners[tri[k]].push_back({tri[(k + 1) % 3], tri[(k + 2) % 3]});
        }
    }
    for (int v = 0; v < N.vertex_count; ++v) {
        if (v != apex && !boundary[v]) mask[v] = 1;
        if (boundary[v]) r[v] = INFINITY;
    }
    IterationResult it{};
    if (std::count(mask.begin(), mask.end(), 1) > 0) {
        it = iterate_label(PackGeometry::hyperbolic, N, bvp_corners, r, mask, opts,
                           std::min(opts.tol * 1e-2, 1e-12));
    }

    std::vector<char> active(N.faces.size(), 1);
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& tri = N.faces[f];
        if (tri[0] == apex || tri[1] == apex || tri[2] == apex) active[f] = 0;
    }
    DiskDevelopment dev = develop_disk(N, T, PackGeometry::hyperbolic, r, active);
    if (!dev.wraps.empty()) {
        throw ConvergenceError("genus-0 development failed to close up", it.trace);
    }
    std::vector<GeneralizedCircle> circles = dev.canonical;
    circles[apex] = GeneralizedCircle::circle(cplx{0, 0}, 1.0, -1);
    std::vector<Cap> caps(N.vertex_count);
    for (int v = 0; v < N.vertex_count; ++v) {
        caps[v] = {circle_to_cap_center(circles[v]), circle_to_cap_radius(circles[v])};
    }
    balance_caps(caps);
    std::vector<double> rho(N.vertex_count, 0.0);
    for (int v = 0; v < N.vertex_count; ++v) rho[v] = caps[v].rho;

    out.label = {PackGeometry::sphere, rho};
    out.stats.sweeps = it.sweeps;
    out.stats.residual = angle_sum_residual(N, out.label);
    out.stats.residual_trace = it.trace;
    if (out.stats.residual > opts.tol) {
        throw ConvergenceError("spherical residual above tolerance after extraction: " +
                                   std::to_string(out.stats.residual),
                               out.stats.residual_trace);
    }
    return out;
}

Layout develop_layout(const Nerve& N, const PackingLabel& L, double tol) {
    NerveTopology T = analyze_nerve(N);
    if (static_cast<int>(L.radii.size()) != N.vertex_count) {
        throw ValidationError("develop_layout: label size mismatch");
    }
    Layout lyt;
    lyt.geometry = L.geometry;
    lyt.face_circles.resize(N.faces.size());
    lyt.face_dual.resize(N.faces.size());
    lyt.face_tangency.resize(N.faces.size());

    if (L.geometry == PackGeometry::sphere) {
        SphereDevelopment dev = develop_sphere(N, T, L.radii);
        lyt.vertex_circles = dev.canonical;
        lyt.sphere_apex = N.faces[0][0];
        for (size_t f = 0; f < N.faces.size(); ++f) {
            const auto& tri = N.faces[f];
            lyt.face_circles[f] = {dev.canonical[tri[0]], dev.canonical[tri[1]],
                                   dev.canonical[tri[2]]};
        }
        lyt.holonomy.max_tree_mismatch = dev.max_closure;
        lyt.edge_transition.assign(T.edges.size(), MobiusMap::identity());
    } else {
        std::vector<char> active(N.faces.size(), 1);
        DiskDevelopment dev = develop_disk(N, T, L.geometry, L.radii, active);
        lyt.vertex_circles = dev.canonical;
        lyt.face_circles = dev.face_circles;
        lyt.holonomy.max_tree_mismatch = dev.max_closure;
        // Per-edge transition isometries between the two incident charts.
        lyt.edge_transition.assign(T.edges.size(), MobiusMap::identity());
        auto slot_of = [&](int face, int vert) {
            for (int s = 0; s < 3; ++s) {
                if (N.faces[face][s] == vert) return s;
            }
            throw ValidationError("develop_layout: vertex not in face");
        };
        for (size_t e = 0; e < T.edges.size(); ++e) {
            int fa = T.edge_faces[e][0], fb = T.edge_faces[e][1];
            int u = T.edges[e][0], v = T.edges[e][1];
            const auto& au = lyt.face_circles[fa][slot_of(fa, u)];
            const auto& av = lyt.face_circles[fa][slot_of(fa, v)];
            const auto& bu = lyt.face_circles[fb][slot_of(fb, u)];
            const auto& bv = lyt.face_circles[fb][slot_of(fb, v)];
            double gap = std::max(vec_dist(au, bu), vec_dist(av, bv));
            if (gap < 1e-9) continue; // same chart
            MobiusMap M = fit_transition(L.geometry, bu, bv, au, av);
            lyt.edge_transition[e] = M;
            lyt.holonomy.nontrivial_transitions.push_back(
                {static_cast<int>(e), M.distance_from_identity()});
        }
    }

    // Duals and tangency points, chart by chart.
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& fc = lyt.face_circles[f];
        lyt.face_dual[f] = dual_circle(fc[0], fc[1], fc[2]);
        for (int k = 0; k < 3; ++k) {
            lyt.face_tangency[f][k] = tangency_point(fc[k], fc[(k + 1) % 3], 1e-6);
        }
    }
    lyt.edge_tangency.resize(T.edges.size());
    for (size_t e = 0; e < T.edges.size(); ++e) {
        int fa = T.edge_faces[e][0];
        for (int k = 0; k < 3; ++k) {
            if (T.face_edges[fa][k] == static_cast<int>(e)) {
                lyt.edge_tangency[e] = lyt.face_tangency[fa][k];
            }
        }
    }

    // Vertex star closure: walk the faces around each vertex, composing the
    // transition maps; the loop must return to the identity.
    double worst_closure = 0.0;
    for (int v = 0; v < N.vertex_count; ++v) {
        worst_closure = std::max(worst_closure, vertex_star(N, T, lyt, v).closure);
    }
    lyt.holonomy.max_vertex_closure = worst_closure;

    double tres = tangency_residual(N, lyt);
    double ores = dual_orthogonality_residual(N, lyt);
    if (tres > tol || ores > tol) {
        std::ostringstream os;
        os << "layout residuals above tolerance: tangency " << tres << ", orthogonality " << ores;
        throw AuditError(os.str(), "layout");
    }
    if (worst_closure > std::max(tol, 1e-6)) {
        throw AuditError("holonomy residual above tolerance: " + std::to_string(worst_closure),
                         "layout");
    }
    return lyt;
}

VertexStar vertex_star(const Nerve& N, const NerveTopology& T, const Layout& lyt, int v) {
    if (v < 0 || v >= N.vertex_count) throw ValidationError("vertex_star: vertex out of range");
    int f0 = -1;
    for (size_t f = 0; f < N.faces.size() && f0 < 0; ++f) {
        const auto& tri = N.faces[f];
        if (tri[0] == v || tri[1] == v || tri[2] == v) f0 = static_cast<int>(f);
    }
    VertexStar star;
    MobiusMap acc = MobiusMap::identity();
    int f = f0;
    int count = 0;
    do {
        const auto& tri = N.faces[f];
        int k = 0;
        while (tri[k] != v) ++k;
        star.edges.push_back(T.face_edges[f][k]);
        star.points.push_back(acc.apply(lyt.face_tangency[f][k]));
        int y = tri[(k + 2) % 3];
        int e = T.edge_id(v, y);
        int fn = T.other_face(e, f);
        // stored map sends the edge_faces[e][1] chart into the [0] chart;
        // crossing f -> fn needs chart(fn) -> chart(f).
        MobiusMap step = (T.edge_faces[e][0] == f) ? lyt.edge_transition[e]
                                                   : lyt.edge_transition[e].inverse();
        acc = compose(acc, step);
        f = fn;
        if (++count > 3 * static_cast<int>(N.faces.size())) {
            throw AuditError("vertex star walk does not close", "vertex " + std::to_string(v));
        }
    } while (f != f0);
    const auto& tri0 = N.faces[f0];
    int k0 = 0;
    while (tri0[k0] != v) ++k0;
    Point t0 = lyt.face_tangency[f0][k0];
    Point t1 = acc.apply(t0);
    if (!t0.infinite && !t1.infinite) {
        star.closure = std::abs(t1.z - t0.z);
    } else if (t0.infinite != t1.infinite) {
        star.closure = std::numeric_limits<double>::infinity();
    }
    return star;
}

double tangency_residual(const Nerve& N, const Layout& lyt) {
    double worst = 0.0;
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& fc = lyt.face_circles[f];
        for (int k = 0; k < 3; ++k) {
            double p = inversive_product(fc[k], fc[(k + 1) % 3], 1e-5);
            worst = std::max(worst, std::abs(std::abs(p) - 1.0));
        }
    }
    return worst;
}

double dual_orthogonality_residual(const Nerve& N, const Layout& lyt) {
    double worst = 0.0;
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& fc = lyt.face_circles[f];
        for (int k = 0; k < 3; ++k) {
            worst = std::max(worst, std::abs(inversive_product(lyt.face_dual[f], fc[k], 1e-5)));
        }
    }
    return worst;
}

namespace {

double model_diameter(PackGeometry geom, const GeneralizedCircle& C) {
    if (geom == PackGeometry::sphere) return 2.0 * circle_to_cap_radius(C);
    if (C.is_line()) return std::numeric_limits<double>::infinity();
    return 2.0 * C.radius();
}

} // namespace

DiameterReport diameter_report(const Nerve& N, const Layout& lyt,
                               const std::vector<int>* vertex_subset,
                               const std::vector<std::array<int, 3>>* face_subset) {
    DiameterReport rep;
    std::vector<int> verts;
    if (vertex_subset) {
        verts = *vertex_subset;
    } else {
        verts.resize(N.vertex_count);
        for (int v = 0; v < N.vertex_count; ++v) verts[v] = v;
    }
    std::vector<std::array<int, 3>> faces;
    if (face_subset) {
        faces = *face_subset;
    } else {
        faces = N.faces;
    }
    if (verts.empty() || faces.empty()) {
        throw ValidationError("diameter_report: empty selection");
    }
    for (int v : verts) {
        if (v < 0 || v >= N.vertex_count) throw ValidationError("diameter_report: bad vertex");
        double d = model_diameter(lyt.geometry, lyt.vertex_circles[v]);
        rep.circle_diameters.push_back(d);
        rep.max_circle_diameter = std::max(rep.max_circle_diameter, d);
    }
    for (const auto& tri : faces) {
        GeneralizedCircle D = dual_circle(lyt.vertex_circles[tri[0]], lyt.vertex_circles[tri[1]],
                                          lyt.vertex_circles[tri[2]]);
        double d = model_diameter(lyt.geometry, D);
        rep.interstice_diameters.push_back(d);
        rep.max_interstice_diameter = std::max(rep.max_interstice_diameter, d);
    }
    return rep;
}

} // namespace falforge
