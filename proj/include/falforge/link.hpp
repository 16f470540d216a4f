#pragma once

#include <array>
#include <vector>

#include "falforge/nerve.hpp"
#include "falforge/packing.hpp"

namespace falforge {

/// One crossing circle of the diagram, sitting over a matched dual arc.
/// Four strand-ends pass through it, two per side; the slot order at each
/// side comes from the cyclic arc order at the cubic dual node.
struct CrossingCircle {
    int dual_arc = -1;                 // matched arc (= nerve edge id)
    std::array<int, 2> nodes{};        // the two dual nodes it joins
    // strand attached at [side][slot]: index of the strand arc
    std::array<std::array<int, 2>, 2> strand{};
    // which end (0/1) of that strand arc sits here
    std::array<std::array<int, 2>, 2> strand_end{};
    bool half_twist = false;
    int twist_sign = +1; // direction bit; does not affect component tracing
};

/// A strand arc of the diagram (an unmatched dual arc).
struct StrandArc {
    int dual_arc = -1;
    std::array<int, 2> nodes{};
    struct Attach {
        int circle = -1;
        int side = -1;
        int slot = -1;
    };
    std::array<Attach, 2> ends{};
};

struct FALDiagram {
    int genus = 0;
    std::vector<CrossingCircle> circles;
    std::vector<StrandArc> strands;
};

/// Partition of the strand arcs into link components (closed under the
/// through-crossing-circle connection relation).
struct ComponentPartition {
    std::vector<std::vector<int>> components; // strand arc ids, each sorted
    int count() const { return static_cast<int>(components.size()); }
    int component_of(int strand) const;
};

/// Synthesize the fully augmented link diagram from a matched dual graph:
/// one crossing circle per matched arc, strand arcs along unmatched arcs.
/// Throws ValidationError if the matching is not perfect.
FALDiagram synth_fal(const DualGraph& G, int genus);

/// Trace link components. Without a half-twist the strand-ends pass through
/// a crossing circle parallel (side-0 slot a joins side-1 slot b); a
/// half-twist transposes the sides.
ComponentPartition trace_components(const FALDiagram& F);

/// Copy of the diagram with one half-twist flag toggled.
FALDiagram toggle_half_twist(const FALDiagram& F, int circle);

struct ReduceResult {
    FALDiagram diagram;
    std::vector<int> toggled; // crossing circles, in toggle order
};

/// Add half-twists (lowest merging circle first) until a single
/// non-crossing-circle component remains.
ReduceResult reduce_to_knot(const FALDiagram& F);

} // namespace falforge
