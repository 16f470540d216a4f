#pragma once

#include <cstdlib>
#include <random>
#include <string>

#include "falforge/nerve.hpp"

namespace falforge::fixtures {

/// Deterministic RNG; FALFORGE_SEED overrides the default seed.
inline std::mt19937_64 make_rng(uint64_t salt = 0) {
    uint64_t seed = 20260809ull;
    if (const char* env = std::getenv("FALFORGE_SEED")) {
        seed = std::strtoull(env, nullptr, 10);
    }
    return std::mt19937_64(seed ^ (salt * 0x9e3779b97f4a7c15ull));
}

inline Nerve tetrahedron() {
    Nerve N;
    N.vertex_count = 4;
    N.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
    return N;
}

inline Nerve octahedron() {
    Nerve N;
    N.vertex_count = 6;
    N.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1},
               {5, 2, 1}, {5, 3, 2}, {5, 4, 3}, {5, 1, 4}};
    return N;
}

/// The 7-vertex triangulation of the torus (every vertex has degree 6).
inline Nerve torus7() {
    Nerve N;
    N.vertex_count = 7;
    for (int i = 0; i < 7; ++i) {
        int a = i, b = (i + 1) % 7, c = (i + 3) % 7, d = (i + 2) % 7;
        N.faces.push_back({a, b, c});
        N.faces.push_back({a, c, d});
    }
    return N;
}

/// Connected sum along a face of each summand: remove the faces, identify the
/// boundary triangles with reversed orientation.
inline Nerve connected_sum(const Nerve& N1, int f1, const Nerve& N2, int f2) {
    auto [a, b, c] = N1.faces[f1];
    auto [d, e, f] = N2.faces[f2];
    // d -> a, e -> c, f -> b makes the two boundary cycles cancel.
    std::vector<int> relabel(N2.vertex_count, -1);
    relabel[d] = a;
    relabel[e] = c;
    relabel[f] = b;
    int next = N1.vertex_count;
    for (int v = 0; v < N2.vertex_count; ++v) {
        if (relabel[v] < 0) relabel[v] = next++;
    }
    Nerve out;
    out.vertex_count = next;
    for (int i = 0; i < static_cast<int>(N1.faces.size()); ++i) {
        if (i != f1) out.faces.push_back(N1.faces[i]);
    }
    for (int i = 0; i < static_cast<int>(N2.faces.size()); ++i) {
        if (i == f2) continue;
        const auto& tri = N2.faces[i];
        out.faces.push_back({relabel[tri[0]], relabel[tri[1]], relabel[tri[2]]});
    }
    return out;
}

/// Genus-2 nerve: connected sum of two 7-vertex tori (11 vertices, 26 faces).
inline Nerve genus2() {
    Nerve t = torus7();
    return connected_sum(t, 0, t, 0);
}

/// Split one face into three around a fresh interior vertex.
inline Nerve split_face(const Nerve& N, int f) {
    Nerve out = N;
    int x = out.vertex_count++;
    auto tri = out.faces[f];
    out.faces[f] = {tri[0], tri[1], x};
    out.faces.push_back({tri[1], tri[2], x});
    out.faces.push_back({tri[2], tri[0], x});
    return out;
}

/// Grow a nerve by random face splits (keeps genus and orientation).
inline Nerve random_grow(Nerve N, int steps, std::mt19937_64& rng) {
    for (int s = 0; s < steps; ++s) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(N.faces.size()) - 1);
        N = split_face(N, pick(rng));
    }
    return N;
}

} // namespace falforge::fixtures
