#include "falforge/pipeline.hpp"

#include <filesystem>
#include <functional>
#include <sstream>

#include "falforge/filling.hpp"
#include "falforge/json_io.hpp"
#include "falforge/link.hpp"
#include "falforge/scoop.hpp"
#include "falforge/svg_render.hpp"

namespace falforge {

namespace {

namespace fs = std::filesystem;

void check_config(const PipelineConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("no input file given");
    if (cfg.out_dir.empty()) throw ValidationError("no output directory given");
    if (!(cfg.tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (cfg.max_iters < 1) throw ValidationError("iteration budget must be positive");
}

std::string out_path(const PipelineConfig& cfg, const char* name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

int run_guarded(std::ostream& log, const char* what, const std::function<void()>& body) {
    try {
        body();
        return kOk;
    } catch (const ParseError& e) {
        log << what << ": parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const ValidationError& e) {
        log << what << ": validation error: " << e.what() << "\n";
        return kValidationError;
    } catch (const ConvergenceError& e) {
        log << what << ": numeric failure: " << e.what() << "\n";
        if (!e.residual_trace.empty()) {
            log << "  residual trace:";
            for (double r : e.residual_trace) log << " " << r;
            log << "\n";
        }
        return kNumericError;
    } catch (const AuditError& e) {
        log << what << ": audit failure at " << e.cell_name << ": " << e.what() << "\n";
        return kAuditError;
    }
}

struct BuildProducts {
    Nerve nerve;
    Dimer dimer;
    SolveResult solved;
    Layout layout;
    ScoopComplex scoop;
    FiniteVolumeReport volume;
    FALDiagram diagram;
    ComponentPartition components;
    std::vector<CuspShape> cusps;
    std::vector<int> toggled;
};

SolveResult solve_for(const PipelineConfig& cfg, const Nerve& N) {
    NerveTopology T = analyze_nerve(N);
    PackGeometry geom = cfg.geometry.value_or(natural_geometry(T.genus));
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_sweeps = cfg.max_iters;
    return solve_packing_label(N, geom, opts);
}

BuildProducts run_build(const PipelineConfig& cfg, std::ostream& log) {
    BuildProducts P;
    NerveFile in = read_nerve_file(cfg.input);
    if (in.dimer) {
        P.nerve = in.nerve;
        P.dimer = *in.dimer;
        if (!validate_dimer(P.nerve, P.dimer)) {
            throw ValidationError("input dimer fails the one-colored-edge-per-face condition");
        }
    } else {
        log << "input has no dimer; subdividing once to create one\n";
        std::tie(P.nerve, P.dimer) = subdivide_with_dimer(in.nerve);
    }
    P.solved = solve_for(cfg, P.nerve);
    P.layout = develop_layout(P.nerve, P.solved.label);
    P.scoop = build_scoop(P.nerve, P.dimer, P.layout);
    P.volume = finite_volume_audit(P.scoop);

    NerveTopology T = analyze_nerve(P.nerve);
    DualGraph G = dual_with_matching(P.nerve, P.dimer);
    P.diagram = synth_fal(G, T.genus);
    if (!cfg.no_reduce) {
        ReduceResult red = reduce_to_knot(P.diagram);
        P.diagram = std::move(red.diagram);
        P.toggled = std::move(red.toggled);
    }
    P.components = trace_components(P.diagram);
    for (const CrossingCircle& C : P.diagram.circles) {
        const RectangleShape& R = P.volume.rectangles[C.dual_arc];
        P.cusps.push_back({R.w, R.b, C.half_twist});
    }
    return P;
}

std::string pack_report(const Nerve& N, const SolveResult& res, const Layout& lyt) {
    std::ostringstream os;
    os.precision(12);
    os << "packing report\n";
    os << "  vertices: " << N.vertex_count << ", faces: " << N.faces.size() << "\n";
    os << "  geometry: " << to_string(res.label.geometry) << "\n";
    os << "  sweeps: " << res.stats.sweeps << "\n";
    os << "  angle-sum residual: " << angle_sum_residual(N, res.label) << "\n";
    os << "  tangency residual: " << tangency_residual(N, lyt) << "\n";
    os << "  dual orthogonality residual: " << dual_orthogonality_residual(N, lyt) << "\n";
    os << "  holonomy closure: " << lyt.holonomy.max_vertex_closure << "\n";
    return os.str();
}

} // namespace

int cmd_pack(const PipelineConfig& cfg, std::ostream& log) {
    return run_guarded(log, "pack", [&] {
        check_config(cfg);
        NerveFile in = read_nerve_file(cfg.input);
        SolveResult res = solve_for(cfg, in.nerve);
        Layout lyt = develop_layout(in.nerve, res.label);
        write_text_file(out_path(cfg, "label.json"), label_to_json(in.nerve, res.label, res.stats));
        write_text_file(out_path(cfg, "layout.json"), layout_to_json(in.nerve, lyt));
        write_text_file(out_path(cfg, "pack_report.txt"), pack_report(in.nerve, res, lyt));
        if (cfg.render) {
            write_text_file(out_path(cfg, "packing.svg"), render_packing_svg(in.nerve, lyt));
        }
        log << "pack: residual " << res.stats.residual << " after " << res.stats.sweeps
            << " sweeps\n";
    });
}

int cmd_build(const PipelineConfig& cfg, std::ostream& log) {
    return run_guarded(log, "build", [&] {
        check_config(cfg);
        BuildProducts P = run_build(cfg, log);
        write_text_file(out_path(cfg, "label.json"),
                        label_to_json(P.nerve, P.solved.label, P.solved.stats));
        write_text_file(out_path(cfg, "layout.json"), layout_to_json(P.nerve, P.layout));
        write_text_file(out_path(cfg, "scoop.json"), scoop_to_json(P.scoop, P.volume));
        write_text_file(out_path(cfg, "fal.json"),
                        fal_to_json(P.diagram, P.components, P.cusps));
        std::ostringstream rep;
        rep << pack_report(P.nerve, P.solved, P.layout);
        rep << "scoop: white " << P.scoop.white_count << ", black " << P.scoop.black_count
            << ", ideal vertices " << P.scoop.ideal_count << "\n";
        rep << "link: " << P.diagram.circles.size() << " crossing circles, "
            << P.diagram.strands.size() << " strand arcs, " << P.components.count()
            << " component(s)";
        if (!P.toggled.empty()) {
            rep << " after " << P.toggled.size() << " half-twist(s) at circles";
            for (int c : P.toggled) rep << " " << c;
        }
        rep << "\n";
        write_text_file(out_path(cfg, "build_report.txt"), rep.str());
        if (cfg.render) {
            write_text_file(out_path(cfg, "packing.svg"), render_packing_svg(P.nerve, P.layout));
            write_text_file(out_path(cfg, "diagram.svg"),
                            render_diagram_svg(P.nerve, P.layout, P.diagram));
        }
        log << "build: " << P.diagram.circles.size() << " crossing circles, "
            << P.components.count() << " component(s)\n";
    });
}

int cmd_plan(const PipelineConfig& cfg, std::ostream& log) {
    return run_guarded(log, "plan", [&] {
        check_config(cfg);
        if (!(cfg.epsilon > 0.0)) throw ValidationError("--epsilon must be positive");
        if (!(cfg.delta > 0.0)) throw ValidationError("--delta must be positive");
        if (!(cfg.bigR > 0.0)) throw ValidationError("--bigR must be positive");
        FALFile fal = read_fal_file(cfg.input);
        if (fal.cusps.empty()) throw ValidationError("FAL artifact has no crossing circles");
        SlopePlan plan = make_plan(cfg.epsilon, cfg.bigR, cfg.delta, fal.cusps);
        Certificate cert = certificate(cfg.epsilon, cfg.bigR, cfg.delta, plan);
        write_text_file(out_path(cfg, "plan.json"), plan_to_json(plan, cert));
        write_text_file(out_path(cfg, "plan_report.txt"), cert.report);
        log << "plan: threshold " << plan.threshold << ", verdict "
            << (cert.pass ? "pass" : "fail") << "\n";
    });
}

int cmd_render(const PipelineConfig& cfg, std::ostream& log) {
    return run_guarded(log, "render", [&] {
        check_config(cfg);
        BuildProducts P = run_build(cfg, log);
        write_text_file(out_path(cfg, "packing.svg"), render_packing_svg(P.nerve, P.layout));
        write_text_file(out_path(cfg, "diagram.svg"),
                        render_diagram_svg(P.nerve, P.layout, P.diagram));
        log << "render: wrote packing.svg and diagram.svg\n";
    });
}

} // namespace falforge
