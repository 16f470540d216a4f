#pragma once

#include <numeric>
#include <vector>

#include "falforge/link.hpp"

namespace falforge::oracles {

/// Brute-force union-find over strand-end connections; independent of the
/// traversal in trace_components.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

inline int component_count(const FALDiagram& F) {
    UnionFind uf(static_cast<int>(F.strands.size()));
    for (const CrossingCircle& C : F.circles) {
        for (int slot = 0; slot < 2; ++slot) {
            int partner = C.half_twist ? slot : 1 - slot;
            uf.unite(C.strand[0][slot], C.strand[1][partner]);
        }
    }
    int count = 0;
    for (int s = 0; s < static_cast<int>(F.strands.size()); ++s) {
        if (uf.find(s) == s) ++count;
    }
    return count;
}

} // namespace falforge::oracles
