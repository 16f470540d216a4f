#pragma once

#include <array>
#include <vector>

#include "falforge/geometry.hpp"
#include "falforge/nerve.hpp"
#include "falforge/packing.hpp"

namespace falforge {

/// Horoball cross-section at an ideal vertex: side lengths of the Euclidean
/// rectangle cut out by the two white and two black planes, reported at the
/// height where the shorter side is 1.
struct RectangleShape {
    double w = 0.0; // sides lying in white faces (separation of the black line pair)
    double b = 0.0; // sides lying in black faces (separation of the white line pair)
    double modulus = 0.0; // w / b

    // raw line separations before height normalization, and the worst
    // parallelism/orthogonality angle residual of the four image lines
    double raw_w = 0.0;
    double raw_b = 0.0;
    double angle_residual = 0.0;
};

/// One ideal vertex of the scooped boundary: the tangency point of a nerve
/// edge, with its four incident face circles transported into a common chart.
struct IdealVertexCell {
    int edge = -1;
    Point tangency;
    std::array<int, 2> white_vertices{};           // nerve vertices
    std::array<int, 2> black_faces{};              // nerve faces
    std::array<GeneralizedCircle, 2> white_circles;
    std::array<GeneralizedCircle, 2> black_circles;
};

/// Checkerboard-colored boundary complex of the scooped manifold. White
/// faces come from packing circles (one per nerve vertex), black triangles
/// from dual circles (one per nerve face), ideal vertices from tangencies
/// (one per nerve edge).
struct ScoopComplex {
    int white_count = 0;
    int black_count = 0;
    int ideal_count = 0;

    std::vector<std::vector<int>> white_edges;   // per vertex: incident edges, cyclic
    std::vector<std::vector<Point>> white_points; // matching tangency points, one chart
    std::vector<std::array<int, 3>> black_edges; // per face: its edge ids
    std::vector<int> black_pair;                 // per face: dimer partner
    std::vector<IdealVertexCell> ideal_vertices; // per edge

    double max_orthogonality_residual = 0.0;
    double max_white_tangency_residual = 0.0;
    double max_closure = 0.0;
};

/// Assemble and audit the scooped boundary complex. Throws AuditError naming
/// the offending cell on any structural or geometric violation.
ScoopComplex build_scoop(const Nerve& N, const Dimer& D, const Layout& lyt);

/// Rectangle cross-section at an ideal vertex, via normalization of its
/// tangency point to infinity. Throws AuditError if the four circles fail to
/// become two orthogonal parallel line pairs.
RectangleShape rectangle_shape(const ScoopComplex& S, int ideal_vertex);

struct FiniteVolumeReport {
    int white_count = 0;
    int black_count = 0;
    int ideal_count = 0;
    int black_pairs = 0;
    std::vector<RectangleShape> rectangles;  // per ideal vertex
    double horoball_scale = 0.0;             // common shrink making sections disjoint
    std::vector<double> horoball_diameters;  // at that scale, in the layout chart
};

/// Finiteness certificate: finitely many cells, a valid rectangle at every
/// ideal vertex, and a common horoball scale at which all cross-sections are
/// pairwise disjoint. Throws AuditError if no admissible scale exists.
FiniteVolumeReport finite_volume_audit(const ScoopComplex& S);

} // namespace falforge
