// Acceptance suite: every criterion prints one pass/fail line; the process
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "falforge/filling.hpp"
#include "falforge/json_io.hpp"
#include "falforge/link.hpp"
#include "falforge/pipeline.hpp"
#include "falforge/scoop.hpp"
#include "json.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace falforge;
using namespace falforge::fixtures;
namespace fs = std::filesystem;

namespace {

struct Checker {
    bool ok = true;
    std::string first_failure;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            first_failure = what;
        }
    }
};

int g_failures = 0;

void criterion(int number, const std::string& title, const std::function<void(Checker&)>& body) {
    Checker c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    if (c.ok) {
        std::printf("[PASS] criterion %d: %s\n", number, title.c_str());
    } else {
        std::printf("[FAIL] criterion %d: %s -- %s\n", number, title.c_str(),
                    c.first_failure.c_str());
        ++g_failures;
    }
    std::fflush(stdout);
}

struct NamedNerve {
    std::string name;
    Nerve nerve;
};

std::vector<NamedNerve> solver_nerves() {
    auto [sub_tet, d] = subdivide_with_dimer(tetrahedron());
    (void)d;
    return {{"tetrahedron", tetrahedron()},
            {"subdivided tetrahedron", sub_tet},
            {"7-vertex torus", torus7()},
            {"genus-2", genus2()}};
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

} // namespace

int main() {
    criterion(1, "packing solver residual < 1e-10, re-verified independently", [](Checker& c) {
        for (const auto& [name, nerve] : solver_nerves()) {
            auto start = std::chrono::steady_clock::now();
            NerveTopology T = analyze_nerve(nerve);
            auto res = solve_packing_label(nerve, natural_geometry(T.genus), {});
            double independent = 0.0;
            for (int v = 0; v < nerve.vertex_count; ++v) {
                independent = std::max(
                    independent, std::abs(angle_sum(nerve, res.label, v) - 2.0 * M_PI));
            }
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count();
            c.require(independent < 1e-10,
                      name + ": independent residual " + fmt(independent));
            c.require(secs < 10.0, name + ": runtime " + fmt(secs) + "s");
        }
    });

    criterion(2, "layout tangency and dual orthogonality residuals < 1e-8", [](Checker& c) {
        for (const auto& [name, nerve] : solver_nerves()) {
            NerveTopology T = analyze_nerve(nerve);
            auto res = solve_packing_label(nerve, natural_geometry(T.genus), {});
            Layout lyt = develop_layout(nerve, res.label);
            double tres = tangency_residual(nerve, lyt);
            double ores = dual_orthogonality_residual(nerve, lyt);
            c.require(tres < 1e-8, name + ": tangency residual " + fmt(tres));
            c.require(ores < 1e-8, name + ": orthogonality residual " + fmt(ores));
        }
    });

    criterion(3, "subdivision dimers are valid with |D| = F/2 on 100 random nerves",
              [](Checker& c) {
                  auto rng = make_rng(103);
                  for (int it = 0; it < 100; ++it) {
                      Nerve base = (it % 3 == 2) ? torus7() : tetrahedron();
                      Nerve grown = random_grow(base, static_cast<int>(rng() % 12), rng);
                      auto [S, D] = subdivide_with_dimer(grown);
                      c.require(validate_dimer(S, D), "dimer invalid");
                      c.require(2 * static_cast<int>(D.edges.size()) ==
                                    static_cast<int>(S.faces.size()),
                                "|D| != F/2");
                  }
              });

    criterion(4, "scoop audits: counts, 4-valent alternating vertices, rectangles",
              [](Checker& c) {
                  for (const auto& [name, base] :
                       {NamedNerve{"tetrahedron", tetrahedron()},
                        NamedNerve{"7-vertex torus", torus7()}, NamedNerve{"genus-2", genus2()}}) {
                      auto [S, D] = subdivide_with_dimer(base);
                      NerveTopology T = analyze_nerve(S);
                      auto res = solve_packing_label(S, natural_geometry(T.genus), {});
                      Layout lyt = develop_layout(S, res.label);
                      ScoopComplex sc = build_scoop(S, D, lyt);
                      c.require(sc.white_count == S.vertex_count, name + ": white != V");
                      c.require(sc.black_count == static_cast<int>(S.faces.size()),
                                name + ": black != F");
                      c.require(sc.ideal_count == static_cast<int>(T.edges.size()),
                                name + ": vertices != E");
                      c.require(sc.max_orthogonality_residual < 1e-8,
                                name + ": orthogonality " + fmt(sc.max_orthogonality_residual));
                      for (int e = 0; e < sc.ideal_count; ++e) {
                          RectangleShape R = rectangle_shape(sc, e);
                          c.require(R.angle_residual < 1e-8,
                                    name + ": rectangle angle residual " + fmt(R.angle_residual));
                      }
                  }
              });

    criterion(5, "half-twist merges across 500 random diagrams; reduce_to_knot reaches 1",
              [](Checker& c) {
                  auto rng = make_rng(105);
                  int merged = 0, reduced = 0;
                  for (int it = 0; it < 500; ++it) {
                      Nerve base = (rng() % 2 == 0) ? tetrahedron() : torus7();
                      Nerve grown = random_grow(base, static_cast<int>(rng() % 8), rng);
                      auto [S, D] = subdivide_with_dimer(grown);
                      NerveTopology T = analyze_nerve(S);
                      FALDiagram F = synth_fal(dual_with_matching(S, D), T.genus);
                      for (auto& cc : F.circles) cc.half_twist = (rng() % 2 == 0);
                      ComponentPartition P = trace_components(F);
                      c.require(P.count() == oracles::component_count(F), "oracle mismatch");
                      if (P.count() >= 2) {
                          for (size_t ci = 0; ci < F.circles.size(); ++ci) {
                              int a = P.component_of(F.circles[ci].strand[0][0]);
                              int b = P.component_of(F.circles[ci].strand[0][1]);
                              if (a != b) {
                                  FALDiagram G = toggle_half_twist(F, static_cast<int>(ci));
                                  int after = trace_components(G).count();
                                  c.require(after == P.count() - 1, "toggle did not merge by 1");
                                  c.require(oracles::component_count(G) == after,
                                            "oracle mismatch after toggle");
                                  ++merged;
                                  break;
                              }
                          }
                      }
                      ReduceResult red = reduce_to_knot(F);
                      c.require(trace_components(red.diagram).count() == 1,
                                "reduce did not reach one component");
                      ++reduced;
                  }
                  c.require(merged > 100, "too few merge cases exercised: " + fmt(merged));
                  c.require(reduced == 500, "reduction did not run on all diagrams");
              });

    criterion(6, "normalized length: lower bound sqrt(c), equality iff w/b = c", [](Checker& c) {
        auto rng = make_rng(106);
        std::uniform_real_distribution<double> side(0.05, 20.0);
        for (int it = 0; it < 10000; ++it) {
            double w = side(rng), b = side(rng);
            long cr = 1 + static_cast<long>(rng() % 200);
            double L = normalized_length({w, b, false}, cr);
            c.require(L >= std::sqrt(static_cast<double>(cr)) - 1e-12, "lower bound violated");
            bool eq = std::abs(L - std::sqrt(static_cast<double>(cr))) <= 1e-9;
            bool ratio = std::abs(w / b - static_cast<double>(cr)) <=
                         2e-9 * (1.0 + static_cast<double>(cr));
            if (eq != ratio) {
                // both flags must agree away from the tolerance boundary
                double excess = (w - cr * b) * (w - cr * b) / (2 * w * b);
                c.require(excess < 1e-7, "equality characterization failed");
            }
        }
        for (long cr = 1; cr <= 100; ++cr) {
            double L = normalized_length({static_cast<double>(cr), 1.0, false}, cr);
            c.require(L == std::sqrt(static_cast<double>(cr)),
                      "minimum at w/b = c not exact for c = " + fmt(cr));
        }
    });

    criterion(7, "effective planner threshold C = 733 and monotone on a 20x20 grid",
              [](Checker& c) {
                  MinCrossings mc = min_crossings(std::exp(1.0) - 1.0, 1.0, 6);
                  c.require(mc.threshold == 733, "C != 733: " + fmt(mc.threshold));
                  for (int i = 0; i < 20; ++i) {
                      for (int j = 0; j < 20; ++j) {
                          double d = 0.2 + 0.2 * i, e = 0.05 + 0.15 * j;
                          long here = min_crossings(e, d, 6).threshold;
                          if (i + 1 < 20) {
                              c.require(min_crossings(e, d + 0.2, 6).threshold <= here,
                                        "not monotone in delta");
                          }
                          if (j + 1 < 20) {
                              c.require(min_crossings(e + 0.15, d, 6).threshold <= here,
                                        "not monotone in epsilon");
                          }
                      }
                  }
              });

    criterion(8, "slope arithmetic: parity and aggregate identities", [](Checker& c) {
        for (long n = -100; n <= 100; ++n) {
            if (n != 0) c.require(crossing_count(n, false) % 2 == 0, "even parity fails");
            c.require(crossing_count(n, true) % 2 == 1, "odd parity fails");
        }
        for (int n = 1; n <= 24; ++n) {
            double C = 733.0;
            std::vector<double> ls(n, std::sqrt(C));
            double got = aggregate_length(ls);
            c.require(std::abs(got - std::sqrt(C / n)) <= 1e-12 * std::sqrt(C),
                      "aggregate of equal lengths off at n = " + fmt(n));
        }
    });

    criterion(9, "end-to-end golden run with passing certificate", [](Checker& c) {
        fs::path dir = fs::temp_directory_path() / "falforge_acceptance";
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::string nerve_path = (dir / "nerve.json").string();
        write_text_file(nerve_path, nerve_to_json(tetrahedron()));

        std::ostringstream log;
        PipelineConfig cfg;
        cfg.input = nerve_path;
        cfg.render = true;
        cfg.out_dir = (dir / "a").string();
        c.require(cmd_build(cfg, log) == kOk, "build run 1 failed: " + log.str());
        cfg.out_dir = (dir / "b").string();
        c.require(cmd_build(cfg, log) == kOk, "build run 2 failed");

        for (const char* name :
             {"label.json", "layout.json", "scoop.json", "fal.json", "packing.svg",
              "diagram.svg"}) {
            std::string a = read_text_file((dir / "a" / name).string());
            std::string b = read_text_file((dir / "b" / name).string());
            c.require(!a.empty() && a == b, std::string("artifact differs: ") + name);
        }

        auto fal = nlohmann::json::parse(read_text_file((dir / "a" / "fal.json").string()));
        c.require(fal["counts"]["crossing_circles"] == 6, "expected 6 crossing circles");
        c.require(fal["counts"]["strand_arcs"] == 12, "expected 12 strand arcs");
        c.require(fal["counts"]["components"] == 1, "expected a single knot component");

        PipelineConfig pcfg;
        pcfg.input = (dir / "a" / "fal.json").string();
        pcfg.epsilon = std::exp(1.0) - 1.0;
        pcfg.bigR = 2.0;
        pcfg.delta = 1.0;
        pcfg.out_dir = (dir / "plan_a").string();
        c.require(cmd_plan(pcfg, log) == kOk, "plan run 1 failed");
        pcfg.out_dir = (dir / "plan_b").string();
        c.require(cmd_plan(pcfg, log) == kOk, "plan run 2 failed");
        c.require(read_text_file((dir / "plan_a" / "plan.json").string()) ==
                      read_text_file((dir / "plan_b" / "plan.json").string()),
                  "plan artifact differs between runs");

        auto plan = nlohmann::json::parse(read_text_file((dir / "plan_a" / "plan.json").string()));
        c.require(plan["threshold"] == 733, "threshold != 733");
        c.require(plan["certificate"]["verdict"] == "pass", "certificate failed");
        long share = (733 + 5) / 6; // 123
        for (const auto& circ : plan["circles"]) {
            long crossings = circ["c"].get<long>();
            bool twist = circ["half_twist"].get<bool>();
            c.require(crossings >= share, "per-circle crossings below share");
            c.require(crossings % 2 == (twist ? 1 : 0), "parity not adjusted");
            c.require(crossings == (twist ? 123 : 124), "not the minimal admissible count");
        }
    });

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
}
