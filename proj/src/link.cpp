#include "falforge/link.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace falforge {

int ComponentPartition::component_of(int strand) const {
    for (size_t c = 0; c < components.size(); ++c) {
        if (std::binary_search(components[c].begin(), components[c].end(), strand)) {
            return static_cast<int>(c);
        }
    }
    throw ValidationError("component_of: unknown strand arc");
}

FALDiagram synth_fal(const DualGraph& G, int genus) {
    FALDiagram F;
    F.genus = genus;

    std::vector<int> node_matched(G.node_count, -1);
    for (size_t e = 0; e < G.arc_nodes.size(); ++e) {
        if (!G.arc_matched[e]) continue;
        for (int n : G.arc_nodes[e]) {
            if (node_matched[n] >= 0) {
                throw ValidationError("synth_fal: matching is not a matching");
            }
            node_matched[n] = static_cast<int>(e);
        }
    }
    for (int n = 0; n < G.node_count; ++n) {
        if (node_matched[n] < 0) throw ValidationError("synth_fal: matching is not perfect");
    }

    std::map<int, int> arc_to_circle;
    std::map<int, int> arc_to_strand;
    for (size_t e = 0; e < G.arc_nodes.size(); ++e) {
        if (G.arc_matched[e]) {
            CrossingCircle C;
            C.dual_arc = static_cast<int>(e);
            C.nodes = G.arc_nodes[e];
            arc_to_circle[static_cast<int>(e)] = static_cast<int>(F.circles.size());
            F.circles.push_back(C);
        } else {
            StrandArc s;
            s.dual_arc = static_cast<int>(e);
            s.nodes = G.arc_nodes[e];
            arc_to_strand[static_cast<int>(e)] = static_cast<int>(F.strands.size());
            F.strands.push_back(s);
        }
    }

    // Wire the four strand-ends of each crossing circle: at each of its two
    // nodes, the unmatched arcs in cyclic order after the matched one.
    for (size_t ci = 0; ci < F.circles.size(); ++ci) {
        CrossingCircle& C = F.circles[ci];
        for (int side = 0; side < 2; ++side) {
            int n = C.nodes[side];
            int k = 0;
            while (G.node_arcs[n][k] != C.dual_arc) ++k;
            for (int slot = 0; slot < 2; ++slot) {
                int arc = G.node_arcs[n][(k + 1 + slot) % 3];
                int si = arc_to_strand.at(arc);
                StrandArc& s = F.strands[si];
                int end = (s.nodes[0] == n) ? 0 : 1;
                if (s.nodes[0] == s.nodes[1]) {
                    // both ends at one node: the first wiring takes end 0
                    end = (s.ends[0].circle < 0) ? 0 : 1;
                }
                C.strand[side][slot] = si;
                C.strand_end[side][slot] = end;
                s.ends[end] = {static_cast<int>(ci), side, slot};
            }
        }
    }
    for (const StrandArc& s : F.strands) {
        if (s.ends[0].circle < 0 || s.ends[1].circle < 0) {
            throw ValidationError("synth_fal: dangling strand end");
        }
    }
    return F;
}

namespace {

// The strand-end glued to (side, slot) across circle C.
std::pair<int, int> partner_slot(const CrossingCircle& C, int side, int slot) {
    int oside = 1 - side;
    int oslot = C.half_twist ? slot : 1 - slot;
    return {oside, oslot};
}

} // namespace

ComponentPartition trace_components(const FALDiagram& F) {
    ComponentPartition P;
    std::vector<char> visited(F.strands.size(), 0);
    for (size_t start = 0; start < F.strands.size(); ++start) {
        if (visited[start]) continue;
        std::vector<int> comp;
        int arc = static_cast<int>(start);
        int exit_end = 1; // leave through end 1 first
        while (!visited[arc]) {
            visited[arc] = 1;
            comp.push_back(arc);
            const StrandArc::Attach& at = F.strands[arc].ends[exit_end];
            const CrossingCircle& C = F.circles[at.circle];
            auto [pside, pslot] = partner_slot(C, at.side, at.slot);
            int next = C.strand[pside][pslot];
            int entered = C.strand_end[pside][pslot];
            arc = next;
            exit_end = 1 - entered;
        }
        std::sort(comp.begin(), comp.end());
        P.components.push_back(std::move(comp));
    }
    std::sort(P.components.begin(), P.components.end());
    return P;
}

FALDiagram toggle_half_twist(const FALDiagram& F, int circle) {
    if (circle < 0 || circle >= static_cast<int>(F.circles.size())) {
        throw ValidationError("toggle_half_twist: circle out of range");
    }
    FALDiagram out = F;
    out.circles[circle].half_twist = !out.circles[circle].half_twist;
    return out;
}

ReduceResult reduce_to_knot(const FALDiagram& F) {
    ReduceResult out;
    out.diagram = F;
    ComponentPartition P = trace_components(out.diagram);
    int guard = P.count() + 1;
    while (P.count() > 1 && guard-- > 0) {
        int merger = -1;
        for (size_t ci = 0; ci < out.diagram.circles.size(); ++ci) {
            const CrossingCircle& C = out.diagram.circles[ci];
            int a = P.component_of(C.strand[0][0]);
            int b = P.component_of(C.strand[0][1]);
            if (a != b) {
                merger = static_cast<int>(ci);
                break;
            }
        }
        if (merger < 0) {
            throw AuditError("no merging crossing circle found on a multi-component diagram",
                             "diagram");
        }
        out.diagram = toggle_half_twist(out.diagram, merger);
        out.toggled.push_back(merger);
        ComponentPartition Q = trace_components(out.diagram);
        if (Q.count() != P.count() - 1) {
            throw AuditError("half-twist toggle failed to merge components", "diagram");
        }
        P = std::move(Q);
    }
    return out;
}

} // namespace falforge
