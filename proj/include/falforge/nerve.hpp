#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "falforge/error.hpp"

namespace falforge {

/// Oriented closed-surface triangulation given as a flat face list.
/// Faces are ordered vertex triples; the listed order fixes the orientation.
struct Nerve {
    int vertex_count = 0;
    std::vector<std::array<int, 3>> faces;
};

/// Edge subset of a nerve (indices into the canonical edge list).
struct Dimer {
    std::vector<int> edges;
};

/// Derived incidence data for a validated nerve. Edges are canonically
/// indexed by sorted endpoint pair, lexicographically.
struct NerveTopology {
    std::vector<std::array<int, 2>> edges;              // {min, max} sorted lexicographically
    std::vector<std::array<int, 3>> face_edges;         // per face: edge ids of (v0v1, v1v2, v2v0)
    std::vector<std::array<int, 2>> edge_faces;         // per edge: the two incident faces
    std::map<std::pair<int, int>, int> edge_index;      // {min,max} -> edge id
    std::map<std::pair<int, int>, int> directed_face;   // directed edge (u,v) -> face containing it
    std::vector<int> vertex_degree;
    int genus = 0;

    int edge_id(int u, int v) const;
    /// The face on the other side of edge e from face f.
    int other_face(int e, int f) const;
};

struct NerveReport {
    bool ok = false;
    int vertices = 0;
    int edges = 0;
    int faces = 0;
    int genus = 0;
    std::vector<std::string> defects;
};

/// Check the closed-oriented-surface axioms and report counts and genus, or
/// a list of structural defects.
NerveReport validate_nerve(const Nerve& N);

/// Validating accessor: returns the incidence data or throws ValidationError
/// describing the first defect.
NerveTopology analyze_nerve(const Nerve& N);

/// Insert one vertex in the interior of every face, splitting it into three.
/// The returned dimer colors the images of the original edges; every new
/// face contains exactly one of them.
std::pair<Nerve, Dimer> subdivide_with_dimer(const Nerve& N);

/// True iff every face of N is adjacent to exactly one colored edge.
/// Throws ValidationError on out-of-range or duplicate edge indices.
bool validate_dimer(const Nerve& N, const Dimer& D);

/// 3-valent dual graph of a nerve: one node per face, one arc per edge, with
/// the cyclic arc order at each node inherited from the face orientation.
struct DualGraph {
    int node_count = 0;                                // = F
    std::vector<std::array<int, 2>> arc_nodes;         // per arc (= nerve edge): incident faces
    std::vector<std::array<int, 3>> node_arcs;         // per node: arcs in cyclic order
    std::vector<bool> arc_matched;                     // transferred dimer coloring
};

/// Build the dual graph and transfer the dimer to a perfect matching.
/// Throws ValidationError if the dimer is invalid.
DualGraph dual_with_matching(const Nerve& N, const Dimer& D);

} // namespace falforge
