#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "falforge/packing.hpp"
#include "support/fixtures.hpp"

using namespace falforge;
using namespace falforge::fixtures;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("angle sums of uniform labels") {
    // degree-6 vertex, equal radii, euclidean: six equilateral corners
    Nerve t7 = torus7();
    PackingLabel uni{PackGeometry::euclidean, std::vector<double>(7, 1.0)};
    for (int v = 0; v < 7; ++v) {
        CHECK(angle_sum(t7, uni, v) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    }
    // degree-4 vertex, equal radii, euclidean: 4*(pi/3)
    Nerve oct = octahedron();
    PackingLabel uni6{PackGeometry::euclidean, std::vector<double>(6, 1.0)};
    CHECK(angle_sum(oct, uni6, 0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(angle_sum(oct, uni6, 0) == doctest::Approx(4.18879).epsilon(1e-5));

    CHECK_THROWS_AS(angle_sum(oct, uni6, 17), ValidationError);
}

TEST_CASE("euclidean torus solve is the uniform label") {
    Nerve t7 = torus7();
    auto res = solve_packing_label(t7, PackGeometry::euclidean, {});
    CHECK(res.stats.residual < 1e-12);
    for (double r : res.label.radii) {
        CHECK(r == doctest::Approx(res.label.radii[0]).epsilon(1e-10));
    }
    CHECK(angle_sum_residual(t7, res.label) < 1e-12);
}

TEST_CASE("tetrahedron sphere solve") {
    Nerve t = tetrahedron();
    auto res = solve_packing_label(t, PackGeometry::sphere, {});
    REQUIRE(res.label.geometry == PackGeometry::sphere);
    CHECK(res.stats.residual < 1e-10);
    for (int v = 0; v < 4; ++v) {
        CHECK(angle_sum(t, res.label, v) == doctest::Approx(2.0 * kPi).epsilon(1e-10));
    }
}

TEST_CASE("subdivided tetrahedron sphere solve") {
    auto [S, D] = subdivide_with_dimer(tetrahedron());
    auto res = solve_packing_label(S, PackGeometry::sphere, {});
    CHECK(res.stats.residual < 1e-10);
    CHECK(angle_sum_residual(S, res.label) < 1e-10);
    (void)D;
}

TEST_CASE("genus-2 hyperbolic solve") {
    Nerve g2 = genus2();
    auto res = solve_packing_label(g2, PackGeometry::hyperbolic, {});
    CHECK(res.stats.residual < 1e-10);
    CHECK(angle_sum_residual(g2, res.label) < 1e-10);
    for (double r : res.label.radii) CHECK(r > 0.0);
}

TEST_CASE("geometry genus mismatch is a validation error") {
    CHECK_THROWS_AS(solve_packing_label(tetrahedron(), PackGeometry::euclidean, {}),
                    ValidationError);
    CHECK_THROWS_AS(solve_packing_label(torus7(), PackGeometry::sphere, {}), ValidationError);
    CHECK_THROWS_AS(solve_packing_label(genus2(), PackGeometry::euclidean, {}), ValidationError);
}

TEST_CASE("iteration budget exhaustion raises ConvergenceError") {
    SolveOptions opts;
    opts.max_sweeps = 0;
    auto [S, D] = subdivide_with_dimer(tetrahedron());
    CHECK_THROWS_AS(solve_packing_label(S, PackGeometry::sphere, opts), ConvergenceError);
    (void)D;
}

TEST_CASE("label is unique after normalization") {
    SolveOptions seeded;
    seeded.initial_radii = std::vector<double>{0.3, 2.0, 1.7, 0.2, 1.1, 0.5, 3.0};
    Nerve t7 = torus7();
    auto a = solve_packing_label(t7, PackGeometry::euclidean, {});
    auto b = solve_packing_label(t7, PackGeometry::euclidean, seeded);
    for (int v = 0; v < 7; ++v) {
        CHECK(a.label.radii[v] == doctest::Approx(b.label.radii[v]).epsilon(1e-8));
    }

    Nerve g2 = genus2();
    SolveOptions seeded2;
    seeded2.initial_radii = std::vector<double>(11, 0.37);
    auto c = solve_packing_label(g2, PackGeometry::hyperbolic, {});
    auto d = solve_packing_label(g2, PackGeometry::hyperbolic, seeded2);
    for (int v = 0; v < 11; ++v) {
        CHECK(c.label.radii[v] == doctest::Approx(d.label.radii[v]).epsilon(1e-8));
    }
}

TEST_CASE("tetrahedron layout develops four mutually tangent circles") {
    Nerve t = tetrahedron();
    auto res = solve_packing_label(t, PackGeometry::sphere, {});
    Layout lyt = develop_layout(t, res.label);
    CHECK(tangency_residual(t, lyt) < 1e-9);
    CHECK(dual_orthogonality_residual(t, lyt) < 1e-9);
    auto T = analyze_nerve(t);
    CHECK(lyt.edge_tangency.size() == 6);
    for (size_t e = 0; e < T.edges.size(); ++e) {
        const Point& p = lyt.edge_tangency[e];
        REQUIRE(!p.infinite);
        CHECK(locus_distance(lyt.vertex_circles[T.edges[e][0]], p.z) < 1e-9);
        CHECK(locus_distance(lyt.vertex_circles[T.edges[e][1]], p.z) < 1e-9);
    }
}

TEST_CASE("torus layout has clean holonomy") {
    Nerve t7 = torus7();
    auto res = solve_packing_label(t7, PackGeometry::euclidean, {});
    Layout lyt = develop_layout(t7, res.label);
    CHECK(tangency_residual(t7, lyt) < 1e-9);
    CHECK(dual_orthogonality_residual(t7, lyt) < 1e-9);
    CHECK(lyt.holonomy.max_vertex_closure < 1e-9);
    CHECK(!lyt.holonomy.nontrivial_transitions.empty()); // the wrap is real
}

TEST_CASE("genus-2 layout in the disk") {
    Nerve g2 = genus2();
    auto res = solve_packing_label(g2, PackGeometry::hyperbolic, {});
    Layout lyt = develop_layout(g2, res.label);
    CHECK(tangency_residual(g2, lyt) < 1e-8);
    CHECK(dual_orthogonality_residual(g2, lyt) < 1e-8);
    CHECK(lyt.holonomy.max_vertex_closure < 1e-8);
    // all circles live inside the unit disk
    for (const auto& C : lyt.vertex_circles) {
        REQUIRE(!C.is_line());
        CHECK(std::abs(C.center()) + C.radius() < 1.0 + 1e-9);
    }
}

TEST_CASE("symmetric tetrahedral configuration has equal diameters") {
    // Four equal caps, each pair tangent: angular radius acos(-1/3)/2.
    double rho = std::acos(-1.0 / 3.0) / 2.0;
    Nerve t = tetrahedron();
    PackingLabel L{PackGeometry::sphere, std::vector<double>(4, rho)};
    CHECK(angle_sum_residual(t, L) < 1e-12);
    Layout lyt = develop_layout(t, L);
    auto rep = diameter_report(t, lyt);
    for (double d : rep.circle_diameters) {
        CHECK(d == doctest::Approx(2.0 * rho).epsilon(1e-10));
    }
    CHECK(rep.max_interstice_diameter > 0.0);
}

TEST_CASE("subdivision does not increase the diameter report") {
    auto rng = make_rng(21);
    for (int it = 0; it < 20; ++it) {
        Nerve base = random_grow(tetrahedron(), static_cast<int>(rng() % 6), rng);
        auto [S, D] = subdivide_with_dimer(base);
        auto res = solve_packing_label(S, PackGeometry::sphere, {});
        Layout lyt = develop_layout(S, res.label);
        auto full = diameter_report(S, lyt);
        std::vector<int> original_vertices(base.vertex_count);
        for (int v = 0; v < base.vertex_count; ++v) original_vertices[v] = v;
        auto coarse = diameter_report(S, lyt, &original_vertices, &base.faces);
        double fine_max = std::max(full.max_circle_diameter, full.max_interstice_diameter);
        double coarse_max = std::max(coarse.max_circle_diameter, coarse.max_interstice_diameter);
        CHECK(fine_max <= coarse_max + 1e-12);
        (void)D;
    }
}

TEST_CASE("diameter report rejects empty selections") {
    Nerve t = tetrahedron();
    auto res = solve_packing_label(t, PackGeometry::sphere, {});
    Layout lyt = develop_layout(t, res.label);
    std::vector<int> none;
    CHECK_THROWS_AS(diameter_report(t, lyt, &none, nullptr), ValidationError);
    std::vector<std::array<int, 3>> nofaces;
    CHECK_THROWS_AS(diameter_report(t, lyt, nullptr, &nofaces), ValidationError);
}

TEST_CASE("solver reruns are deterministic") {
    Nerve g2 = genus2();
    auto a = solve_packing_label(g2, PackGeometry::hyperbolic, {});
    auto b = solve_packing_label(g2, PackGeometry::hyperbolic, {});
    CHECK(a.label.radii == b.label.radii); // bit-identical
}
