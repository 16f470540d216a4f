#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <queue>
#include <random>

#include "falforge/link.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace falforge;
using namespace falforge::fixtures;

namespace {

FALDiagram diagram_of(const Nerve& base) {
    auto [S, D] = subdivide_with_dimer(base);
    NerveTopology T = analyze_nerve(S);
    return synth_fal(dual_with_matching(S, D), T.genus);
}

FALDiagram random_diagram(std::mt19937_64& rng, int max_grow = 8) {
    Nerve base = (rng() % 2 == 0) ? tetrahedron() : torus7();
    Nerve grown = random_grow(base, static_cast<int>(rng() % max_grow), rng);
    FALDiagram F = diagram_of(grown);
    for (auto& C : F.circles) C.half_twist = (rng() % 2 == 0);
    return F;
}

bool diagram_connected(const FALDiagram& F) {
    if (F.circles.empty()) return false;
    std::vector<char> seen(F.circles.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        for (int side = 0; side < 2; ++side) {
            for (int slot = 0; slot < 2; ++slot) {
                const StrandArc& s = F.strands[F.circles[c].strand[side][slot]];
                for (const auto& at : s.ends) {
                    if (!seen[at.circle]) {
                        seen[at.circle] = 1;
                        q.push(at.circle);
                    }
                }
            }
        }
    }
    for (char c : seen) {
        if (!c) return false;
    }
    return true;
}

} // namespace

TEST_CASE("subdivided tetrahedron diagram counts") {
    FALDiagram F = diagram_of(tetrahedron());
    CHECK(F.circles.size() == 6);
    CHECK(F.strands.size() == 12);
    CHECK(2 * F.strands.size() == 4 * F.circles.size());
    CHECK(diagram_connected(F));
    // every strand end attaches where the circle thinks it does
    for (size_t s = 0; s < F.strands.size(); ++s) {
        for (int end = 0; end < 2; ++end) {
            const auto& at = F.strands[s].ends[end];
            CHECK(F.circles[at.circle].strand[at.side][at.slot] == static_cast<int>(s));
            CHECK(F.circles[at.circle].strand_end[at.side][at.slot] == end);
        }
    }
}

TEST_CASE("diagram connectivity for subdivision-generated nerves") {
    auto rng = make_rng(40);
    for (int it = 0; it < 30; ++it) {
        Nerve grown = random_grow(tetrahedron(), static_cast<int>(rng() % 10), rng);
        CHECK(diagram_connected(diagram_of(grown)));
    }
}

TEST_CASE("trace matches the union-find oracle") {
    auto rng = make_rng(41);
    for (int it = 0; it < 100; ++it) {
        FALDiagram F = random_diagram(rng);
        ComponentPartition P = trace_components(F);
        CHECK(P.count() == oracles::component_count(F));
        // the partition covers every strand exactly once
        std::vector<int> seen(F.strands.size(), 0);
        for (const auto& comp : P.components) {
            for (int s : comp) seen[s]++;
        }
        for (int c : seen) CHECK(c == 1);
    }
}

TEST_CASE("toggling a merging circle reduces the count by one") {
    auto rng = make_rng(42);
    int exercised = 0;
    for (int it = 0; it < 120; ++it) {
        FALDiagram F = random_diagram(rng);
        ComponentPartition P = trace_components(F);
        if (P.count() < 2) continue;
        for (size_t c = 0; c < F.circles.size(); ++c) {
            int a = P.component_of(F.circles[c].strand[0][0]);
            int b = P.component_of(F.circles[c].strand[0][1]);
            if (a != b) {
                FALDiagram G = toggle_half_twist(F, static_cast<int>(c));
                CHECK(trace_components(G).count() == P.count() - 1);
                CHECK(oracles::component_count(G) == P.count() - 1);
                // toggling back restores the partition
                FALDiagram H = toggle_half_twist(G, static_cast<int>(c));
                CHECK(trace_components(H).components == P.components);
                ++exercised;
                break;
            }
        }
    }
    CHECK(exercised > 20);
}

TEST_CASE("toggles change the count by at most one") {
    auto rng = make_rng(43);
    for (int it = 0; it < 60; ++it) {
        FALDiagram F = random_diagram(rng);
        int before = trace_components(F).count();
        std::uniform_int_distribution<int> pick(0, static_cast<int>(F.circles.size()) - 1);
        FALDiagram G = toggle_half_twist(F, pick(rng));
        int after = trace_components(G).count();
        CHECK(std::abs(after - before) <= 1);
    }
}

TEST_CASE("reduce to knot") {
    auto rng = make_rng(44);
    for (int it = 0; it < 60; ++it) {
        FALDiagram F = random_diagram(rng);
        int k0 = trace_components(F).count();
        ReduceResult red = reduce_to_knot(F);
        CHECK(trace_components(red.diagram).count() == 1);
        CHECK(static_cast<int>(red.toggled.size()) <= k0 - 1);
        // flags differ from the input exactly at the toggled circles
        for (size_t c = 0; c < F.circles.size(); ++c) {
            bool toggled = std::count(red.toggled.begin(), red.toggled.end(),
                                      static_cast<int>(c)) %
                               2 ==
                           1;
            CHECK(red.diagram.circles[c].half_twist == (F.circles[c].half_twist ^ toggled));
        }
        // determinism
        ReduceResult again = reduce_to_knot(F);
        CHECK(again.toggled == red.toggled);
    }
}

TEST_CASE("reduce is a no-op on single-component diagrams") {
    auto rng = make_rng(45);
    for (int it = 0; it < 40; ++it) {
        FALDiagram F = random_diagram(rng);
        ReduceResult red = reduce_to_knot(F);
        ReduceResult redo = reduce_to_knot(red.diagram);
        CHECK(redo.toggled.empty());
    }
}

TEST_CASE("imperfect matching is rejected") {
    auto [S, D] = subdivide_with_dimer(tetrahedron());
    DualGraph G = dual_with_matching(S, D);
    NerveTopology T = analyze_nerve(S);
    DualGraph broken = G;
    for (size_t e = 0; e < broken.arc_matched.size(); ++e) {
        if (broken.arc_matched[e]) {
            broken.arc_matched[e] = false;
            break;
        }
    }
    CHECK_THROWS_AS(synth_fal(broken, T.genus), ValidationError);
}
