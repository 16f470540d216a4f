#include "falforge/scoop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace falforge {

namespace {

std::string cell_name(const char* kind, int id) {
    std::ostringstream os;
    os << kind << " " << id;
    return os.str();
}

int slot_of(const Nerve& N, int face, int vert) {
    for (int s = 0; s < 3; ++s) {
        if (N.faces[face][s] == vert) return s;
    }
    throw ValidationError("slot_of: vertex not in face");
}

// View a normalized circle that passes (near) the chart's infinity as a
// line: unit normal and signed position along it.
struct LineView {
    cplx normal;
    double position;
};

LineView line_view(const GeneralizedCircle& C, const std::string& cell) {
    double nb = std::abs(C.b);
    if (std::abs(C.a) > 1e-6 * std::max(1.0, nb)) {
        throw AuditError("image circle did not become a line under normalization", cell);
    }
    return {C.b / nb, C.c / (2.0 * nb)};
}

} // namespace

ScoopComplex build_scoop(const Nerve& N, const Dimer& D, const Layout& lyt) {
    NerveTopology T = analyze_nerve(N);
    if (!validate_dimer(N, D)) {
        throw AuditError("dimer condition fails on some face", "dimer");
    }
    if (lyt.face_circles.size() != N.faces.size()) {
        throw AuditError("layout does not match nerve", "layout");
    }

    ScoopComplex S;
    S.white_count = N.vertex_count;
    S.black_count = static_cast<int>(N.faces.size());
    S.ideal_count = static_cast<int>(T.edges.size());

    // Ideal vertices: one per edge, circles transported into the chart of
    // the edge's first incident face.
    S.ideal_vertices.resize(T.edges.size());
    for (size_t e = 0; e < T.edges.size(); ++e) {
        IdealVertexCell& cell = S.ideal_vertices[e];
        cell.edge = static_cast<int>(e);
        int fa = T.edge_faces[e][0], fb = T.edge_faces[e][1];
        int u = T.edges[e][0], v = T.edges[e][1];
        cell.white_vertices = {u, v};
        cell.black_faces = {fa, fb};
        cell.white_circles = {lyt.face_circles[fa][slot_of(N, fa, u)],
                              lyt.face_circles[fa][slot_of(N, fa, v)]};
        cell.black_circles = {lyt.face_dual[fa],
                              mobius_apply(lyt.edge_transition[e], lyt.face_dual[fb])};
        int ka = 0;
        while (T.face_edges[fa][ka] != static_cast<int>(e)) ++ka;
        cell.tangency = lyt.face_tangency[fa][ka];

        // Dihedral right angles and tangency through the ideal vertex.
        for (const auto& W : cell.white_circles) {
            for (const auto& B : cell.black_circles) {
                double p = std::abs(inversive_product(W, B, 1e-5));
                S.max_orthogonality_residual = std::max(S.max_orthogonality_residual, p);
                if (p > 1e-6) {
                    throw AuditError("white/black faces not orthogonal",
                                     cell_name("ideal vertex", static_cast<int>(e)));
                }
            }
        }
        double wt = std::abs(std::abs(inversive_product(cell.white_circles[0],
                                                        cell.white_circles[1], 1e-5)) -
                             1.0);
        S.max_white_tangency_residual = std::max(S.max_white_tangency_residual, wt);
        if (wt > 1e-6) {
            throw AuditError("white faces not tangent at their ideal vertex",
                             cell_name("ideal vertex", static_cast<int>(e)));
        }
    }

    // White faces: edges around each vertex in rotation order. Four-valence
    // of ideal vertices is the statement that each edge shows up in exactly
    // two white stars and two black triangles.
    S.white_edges.resize(N.vertex_count);
    S.white_points.resize(N.vertex_count);
    std::vector<int> white_hits(T.edges.size(), 0);
    for (int v = 0; v < N.vertex_count; ++v) {
        VertexStar star = vertex_star(N, T, lyt, v);
        S.white_edges[v] = star.edges;
        S.white_points[v] = star.points;
        S.max_closure = std::max(S.max_closure, star.closure);
        if (static_cast<int>(star.edges.size()) != T.vertex_degree[v]) {
            throw AuditError("white face does not close around its vertex",
                             cell_name("white face", v));
        }
        for (int e : star.edges) white_hits[e]++;
    }
    for (size_t e = 0; e < T.edges.size(); ++e) {
        if (white_hits[e] != 2) {
            throw AuditError("ideal vertex is not incident to exactly two white faces",
                             cell_name("ideal vertex", static_cast<int>(e)));
        }
    }

    // Black triangles and the dimer pairing.
    S.black_edges = T.face_edges;
    std::vector<char> colored(T.edges.size(), 0);
    for (int e : D.edges) colored[e] = 1;
    S.black_pair.assign(N.faces.size(), -1);
    for (size_t f = 0; f < N.faces.size(); ++f) {
        int ce = -1;
        for (int k = 0; k < 3; ++k) {
            if (colored[T.face_edges[f][k]]) ce = T.face_edges[f][k];
        }
        S.black_pair[f] = T.other_face(ce, static_cast<int>(f));
    }
    for (size_t f = 0; f < N.faces.size(); ++f) {
        int g = S.black_pair[f];
        if (g < 0 || g == static_cast<int>(f) || S.black_pair[g] != static_cast<int>(f)) {
            throw AuditError("dimer pairing is not a fixed-point-free involution",
                             cell_name("black face", static_cast<int>(f)));
        }
    }
    return S;
}

RectangleShape rectangle_shape(const ScoopComplex& S, int ideal_vertex) {
    if (ideal_vertex < 0 || ideal_vertex >= S.ideal_count) {
        throw ValidationError("rectangle_shape: ideal vertex out of range");
    }
    const IdealVertexCell& cell = S.ideal_vertices[ideal_vertex];
    const std::string name = cell_name("ideal vertex", ideal_vertex);
    MobiusMap M = normalize_to_infinity(cell.tangency);

    LineView w0 = line_view(mobius_apply(M, cell.white_circles[0]), name);
    LineView w1 = line_view(mobius_apply(M, cell.white_circles[1]), name);
    LineView b0 = line_view(mobius_apply(M, cell.black_circles[0]), name);
    LineView b1 = line_view(mobius_apply(M, cell.black_circles[1]), name);

    auto align = [](LineView& l, const LineView& ref) {
        if (std::real(l.normal * std::conj(ref.normal)) < 0.0) {
            l.normal = -l.normal;
            l.position = -l.position;
        }
    };
    align(w1, w0);
    align(b1, b0);

    RectangleShape R;
    R.angle_residual = std::max(std::abs(std::imag(w0.normal * std::conj(w1.normal))),
                                std::abs(std::imag(b0.normal * std::conj(b1.normal))));
    double ortho = std::abs(std::real(w0.normal * std::conj(b0.normal)));
    R.angle_residual = std::max(R.angle_residual, ortho);
    if (R.angle_residual > 1e-6) {
        throw AuditError("rectangle images are not orthogonal parallel line pairs", name);
    }
    // Sides crossing between the white planes lie in black faces and vice
    // versa: the white-pair separation is the black side.
    R.raw_b = std::abs(w0.position - w1.position);
    R.raw_w = std::abs(b0.position - b1.position);
    if (!(R.raw_w > 0.0) || !(R.raw_b > 0.0)) {
        throw AuditError("degenerate rectangle section", name);
    }
    double shorter = std::min(R.raw_w, R.raw_b);
    R.w = R.raw_w / shorter;
    R.b = R.raw_b / shorter;
    R.modulus = R.raw_w / R.raw_b;
    return R;
}

FiniteVolumeReport finite_volume_audit(const ScoopComplex& S) {
    FiniteVolumeReport rep;
    rep.white_count = S.white_count;
    rep.black_count = S.black_count;
    rep.ideal_count = S.ideal_count;
    rep.black_pairs = S.black_count / 2;
    rep.rectangles.reserve(S.ideal_count);
    for (int e = 0; e < S.ideal_count; ++e) rep.rectangles.push_back(rectangle_shape(S, e));

    // Horoball sizes: each vertex carries the horoball whose section has its
    // shorter rectangle side equal to 1; under z -> 1/(z - t) a horoball of
    // height H at infinity pulls back to a ball of diameter 1/H at t. Find
    // the largest common shrink keeping all sections pairwise disjoint
    // (tangent balls satisfy |t_i - t_j|^2 = d_i d_j).
    std::vector<double> diam(S.ideal_count);
    for (int e = 0; e < S.ideal_count; ++e) {
        const RectangleShape& R = rep.rectangles[e];
        diam[e] = 1.0 / std::min(R.raw_w, R.raw_b);
        if (S.ideal_vertices[e].tangency.infinite) {
            throw AuditError("tangency point at infinity in horoball audit",
                             cell_name("ideal vertex", e));
        }
    }
    double scale = 1.0;
    for (int i = 0; i < S.ideal_count; ++i) {
        for (int j = i + 1; j < S.ideal_count; ++j) {
            double dist = std::abs(S.ideal_vertices[i].tangency.z -
                                   S.ideal_vertices[j].tangency.z);
            if (dist < 1e-12) {
                throw AuditError("two ideal vertices share a tangency point",
                                 cell_name("ideal vertex", j));
            }
            scale = std::min(scale, dist / std::sqrt(diam[i] * diam[j]));
        }
    }
    rep.horoball_scale = scale;
    rep.horoball_diameters.resize(S.ideal_count);
    for (int e = 0; e < S.ideal_count; ++e) rep.horoball_diameters[e] = scale * diam[e];
    return rep;
}

} // namespace falforge
