#pragma once

#include <optional>
#include <vector>

#include "falforge/geometry.hpp"
#include "falforge/nerve.hpp"

namespace falforge {

enum class PackGeometry { euclidean, hyperbolic, sphere };

const char* to_string(PackGeometry g);
std::optional<PackGeometry> geometry_from_string(const std::string& s);

/// Geometry compatible with a genus: sphere <-> 0, euclidean <-> 1,
/// hyperbolic <-> g >= 2.
PackGeometry natural_geometry(int genus);

/// Per-vertex radii realizing a nerve as a circle packing. Euclidean and
/// hyperbolic labels store radii in their own metric; sphere labels store
/// spherical (angular) radii, computed via the punctured-disk boundary-value
/// route.
struct PackingLabel {
    PackGeometry geometry = PackGeometry::euclidean;
    std::vector<double> radii;
};

struct SolveOptions {
    double tol = 1e-10;
    long max_sweeps = 1000000;
    std::optional<std::vector<double>> initial_radii; // defaults to all ones
};

struct SolveStats {
    long sweeps = 0;
    double residual = 0.0;
    std::vector<double> residual_trace; // tail of the per-sweep residuals
};

struct SolveResult {
    PackingLabel label;
    SolveStats stats;
};

/// Sum of the angles at vertex v over its incident faces, computed from the
/// label radii by the law of cosines of the label geometry.
double angle_sum(const Nerve& N, const PackingLabel& L, int v);

/// max_v |angle_sum(v) - 2 pi|; the packing condition residual.
double angle_sum_residual(const Nerve& N, const PackingLabel& L);

/// Solve the circle packing label for a nerve. Deterministic given the nerve
/// and options. Throws ValidationError on genus/geometry mismatch and
/// ConvergenceError (with residual trace) if the budget runs out.
SolveResult solve_packing_label(const Nerve& N, PackGeometry geometry,
                                const SolveOptions& opts = {});

/// Consistency data for the developed chart structure.
struct HolonomyReport {
    double max_vertex_closure = 0.0;          // worst star-walk closure mismatch
    double max_tree_mismatch = 0.0;           // worst re-derivation gap on tree-closed faces
    std::vector<std::pair<int, double>> nontrivial_transitions; // edge id, |map - id|
};

/// Developed circle configuration for a solved label. Every face carries its
/// own chart copy of its three circles; for genus >= 1 the per-edge
/// transition isometries identify neighbouring charts across the
/// fundamental-domain cut (identity elsewhere).
struct Layout {
    PackGeometry geometry = PackGeometry::euclidean;
    std::vector<GeneralizedCircle> vertex_circles;              // canonical placement
    std::vector<std::array<GeneralizedCircle, 3>> face_circles; // per-face chart
    std::vector<GeneralizedCircle> face_dual;                   // dual circle, face chart
    std::vector<std::array<Point, 3>> face_tangency;            // per-face edge tangencies
    std::vector<Point> edge_tangency;                           // canonical (first face chart)
    std::vector<MobiusMap> edge_transition;                     // edge_faces[e][1] chart -> [0] chart
    HolonomyReport holonomy;
    int sphere_apex = -1; // g = 0: the vertex realized as the outer circle
};

/// Breadth-first development of a converged label into explicit circles.
/// Throws AuditError if tangency or holonomy residuals exceed tolerance.
Layout develop_layout(const Nerve& N, const PackingLabel& L, double tol = 1e-6);

/// The edges at a vertex in rotation order, with their tangency points
/// transported into the chart of the vertex's first incident face. The
/// closure mismatch measures how far the transition maps fail to compose to
/// the identity around v.
struct VertexStar {
    std::vector<int> edges;
    std::vector<Point> points;
    double closure = 0.0;
};

VertexStar vertex_star(const Nerve& N, const NerveTopology& T, const Layout& lyt, int v);

struct DiameterReport {
    double max_circle_diameter = 0.0;
    double max_interstice_diameter = 0.0; // bounded by the dual-circle diameter
    std::vector<double> circle_diameters;
    std::vector<double> interstice_diameters;
};

/// Diameter summary in the layout's normalized model (angular diameters on
/// the unit sphere for genus 0, euclidean diameters in the developed chart
/// otherwise). Optional subsets restrict to chosen vertices/faces; an empty
/// selection is an error.
DiameterReport diameter_report(const Nerve& N, const Layout& lyt,
                               const std::vector<int>* vertex_subset = nullptr,
                               const std::vector<std::array<int, 3>>* face_subset = nullptr);

/// Worst |distance(centers) - (r_u + r_v)|-style tangency residual over all
/// face charts, measured as | |inversive product| - 1 | (scale-free).
double tangency_residual(const Nerve& N, const Layout& lyt);

/// Worst |<dual, circle>| over all faces.
double dual_orthogonality_residual(const Nerve& N, const Layout& lyt);

} // namespace falforge
