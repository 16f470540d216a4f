#include "falforge/nerve.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace falforge {

int NerveTopology::edge_id(int u, int v) const {
    auto it = edge_index.find({std::min(u, v), std::max(u, v)});
    if (it == edge_index.end()) throw ValidationError("edge_id: no such edge");
    return it->second;
}

int NerveTopology::other_face(int e, int f) const {
    const auto& ef = edge_faces[e];
    if (ef[0] == f) return ef[1];
    if (ef[1] == f) return ef[0];
    throw ValidationError("other_face: face not incident to edge");
}

NerveReport validate_nerve(const Nerve& N) {
    NerveReport rep;
    rep.vertices = N.vertex_count;
    rep.faces = static_cast<int>(N.faces.size());

    if (N.vertex_count <= 0) rep.defects.push_back("vertex count must be positive");
    if (N.faces.empty()) rep.defects.push_back("face list is empty");

    std::vector<int> seen(std::max(N.vertex_count, 0), 0);
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& tri = N.faces[f];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= N.vertex_count) {
                std::ostringstream os;
                os << "face " << f << " references vertex " << tri[k] << " out of range";
                rep.defects.push_back(os.str());
                return rep;
            }
            seen[tri[k]] = 1;
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0]) {
            std::ostringstream os;
            os << "face " << f << " repeats a vertex";
            rep.defects.push_back(os.str());
        }
    }
    for (int v = 0; v < N.vertex_count; ++v) {
        if (!seen[v]) {
            std::ostringstream os;
            os << "vertex " << v << " is not used by any face";
            rep.defects.push_back(os.str());
        }
    }
    if (!rep.defects.empty()) return rep;

    // Directed edges: each must occur exactly once (orientability), and each
    // undirected pair exactly twice (closed manifold).
    std::map<std::pair<int, int>, int> directed;
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& tri = N.faces[f];
        for (int k = 0; k < 3; ++k) {
            int u = tri[k], v = tri[(k + 1) % 3];
            auto [it, fresh] = directed.insert({{u, v}, static_cast<int>(f)});
            if (!fresh) {
                std::ostringstream os;
                os << "directed edge (" << u << "," << v << ") appears in faces " << it->second
                   << " and " << f << ": non-orientable or non-manifold gluing";
                rep.defects.push_back(os.str());
            }
        }
    }
    std::map<std::pair<int, int>, int> undirected;
    for (const auto& [de, f] : directed) {
        auto key = std::minmax(de.first, de.second);
        undirected[{key.first, key.second}]++;
    }
    for (const auto& [e, count] : undirected) {
        if (count != 2) {
            std::ostringstream os;
            os << "edge {" << e.first << "," << e.second << "} lies in " << count
               << " faces (expected 2): non-manifold";
            rep.defects.push_back(os.str());
        }
    }
    rep.edges = static_cast<int>(undirected.size());
    if (!rep.defects.empty()) return rep;

    if (3 * rep.faces != 2 * rep.edges) {
        rep.defects.push_back("count identity 3F = 2E fails");
        return rep;
    }

    // Connectivity over the vertex graph.
    std::vector<char> vis(N.vertex_count, 0);
    std::queue<int> q;
    q.push(N.faces[0][0]);
    vis[N.faces[0][0]] = 1;
    std::vector<std::vector<int>> adj(N.vertex_count);
    for (const auto& [e, c] : undirected) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : adj[u]) {
            if (!vis[w]) {
                vis[w] = 1;
                q.push(w);
            }
        }
    }
    if (std::count(vis.begin(), vis.end(), 1) != N.vertex_count) {
        rep.defects.push_back("complex is disconnected");
        return rep;
    }

    int chi = rep.vertices - rep.edges + rep.faces;
    if (chi > 2 || (2 - chi) % 2 != 0) {
        std::ostringstream os;
        os << "Euler characteristic " << chi << " is not of the form 2 - 2g";
        rep.defects.push_back(os.str());
        return rep;
    }
    rep.genus = (2 - chi) / 2;
    rep.ok = true;
    return rep;
}

NerveTopology analyze_nerve(const Nerve& N) {
    NerveReport rep = validate_nerve(N);
    if (!rep.ok) {
        std::string msg = "invalid nerve";
        for (const auto& d : rep.defects) msg += "; " + d;
        throw ValidationError(msg);
    }
    NerveTopology T;
    T.genus = rep.genus;
    std::set<std::pair<int, int>> pairs;
    for (const auto& tri : N.faces) {
        for (int k = 0; k < 3; ++k) {
            int u = tri[k], v = tri[(k + 1) % 3];
            pairs.insert({std::min(u, v), std::max(u, v)});
        }
    }
    for (const auto& p : pairs) {
        T.edge_index[p] = static_cast<int>(T.edges.size());
        T.edges.push_back({p.first, p.second});
    }
    T.edge_faces.assign(T.edges.size(), {-1, -1});
    T.face_edges.resize(N.faces.size());
    T.vertex_degree.assign(N.vertex_count, 0);
    for (size_t f = 0; f < N.faces.size(); ++f) {
        const auto& tri = N.faces[f];
        for (int k = 0; k < 3; ++k) {
            int u = tri[k], v = tri[(k + 1) % 3];
            int e = T.edge_index.at({std::min(u, v), std::max(u, v)});
            T.face_edges[f][k] = e;
            auto& ef = T.edge_faces[e];
            (ef[0] < 0 ? ef[0] : ef[1]) = static_cast<int>(f);
            T.directed_face[{u, v}] = static_cast<int>(f);
        }
    }
    for (const auto& e : T.edges) {
        T.vertex_degree[e[0]]++;
        T.vertex_degree[e[1]]++;
    }
    return T;
}

std::pair<Nerve, Dimer> subdivide_with_dimer(const Nerve& N) {
    NerveTopology T = analyze_nerve(N);
    Nerve out;
    out.vertex_count = N.vertex_count + static_cast<int>(N.faces.size());
    out.faces.reserve(3 * N.faces.size());
    for (size_t f = 0; f < N.faces.size(); ++f) {
        int x = N.vertex_count + static_cast<int>(f);
        const auto& tri = N.faces[f];
        out.faces.push_back({tri[0], tri[1], x});
        out.faces.push_back({tri[1], tri[2], x});
        out.faces.push_back({tri[2], tri[0], x});
    }
    NerveTopology T2 = analyze_nerve(out);
    Dimer D;
    D.edges.reserve(T.edges.size());
    for (const auto& e : T.edges) D.edges.push_back(T2.edge_id(e[0], e[1]));
    std::sort(D.edges.begin(), D.edges.end());
    return {out, D};
}

bool validate_dimer(const Nerve& N, const Dimer& D) {
    NerveTopology T = analyze_nerve(N);
    std::vector<char> colored(T.edges.size(), 0);
    for (int e : D.edges) {
        if (e < 0 || e >= static_cast<int>(T.edges.size())) {
            std::ostringstream os;
            os << "dimer edge index " << e << " out of range (E = " << T.edges.size() << ")";
            throw ValidationError(os.str());
        }
        if (colored[e]) throw ValidationError("dimer lists an edge twice");
        colored[e] = 1;
    }
    for (const auto& fe : T.face_edges) {
        int n = colored[fe[0]] + colored[fe[1]] + colored[fe[2]];
        if (n != 1) return false;
    }
    return true;
}

DualGraph dual_with_matching(const Nerve& N, const Dimer& D) {
    if (!validate_dimer(N, D)) {
        throw ValidationError("dual_with_matching: dimer condition fails on some face");
    }
    NerveTopology T = analyze_nerve(N);
    DualGraph G;
    G.node_count = static_cast<int>(N.faces.size());
    G.arc_nodes = T.edge_faces;
    G.node_arcs = T.face_edges;
    G.arc_matched.assign(T.edges.size(), false);
    for (int e : D.edges) G.arc_matched[e] = true;
    // Transferred coloring must be a perfect matching on the cubic dual.
    std::vector<int> deg(G.node_count, 0);
    for (size_t e = 0; e < G.arc_nodes.size(); ++e) {
        if (!G.arc_matched[e]) continue;
        deg[G.arc_nodes[e][0]]++;
        deg[G.arc_nodes[e][1]]++;
    }
    for (int n = 0; n < G.node_count; ++n) {
        if (deg[n] != 1) {
            std::ostringstream os;
            os << "transferred coloring not a perfect matching at dual node " << n;
            throw ValidationError(os.str());
        }
    }
    return G;
}

} // namespace falforge
