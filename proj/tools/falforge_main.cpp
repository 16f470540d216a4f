#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "falforge/pipeline.hpp"

using namespace falforge;

int main(int argc, char** argv) {
    CLI::App app{"falforge: circle packings, scooped boundary complexes, fully augmented "
                 "link diagrams, and effective filling plans for surface triangulations"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::string geometry_name;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", cfg.input, "input artifact (JSON)")->required();
        cmd->add_option("--out", cfg.out_dir, "output directory (default: .)");
    };
    auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--geometry", geometry_name,
                        "packing geometry: euclidean | hyperbolic | sphere");
        cmd->add_option("--tol", cfg.tol, "solver tolerance (default 1e-10)");
        cmd->add_option("--max-iters", cfg.max_iters, "solver sweep budget (default 1e6)");
        cmd->add_flag("--render", cfg.render, "also write SVG renders");
    };

    CLI::App* pack = app.add_subcommand("pack", "solve the circle packing for a nerve");
    add_common(pack);
    add_solver(pack);

    CLI::App* build =
        app.add_subcommand("build", "scoop complex and link diagram for a nerve (with dimer)");
    add_common(build);
    add_solver(build);
    build->add_flag("--no-reduce", cfg.no_reduce, "keep multiple strand components");

    CLI::App* plan = app.add_subcommand("plan", "effective filling plan for a FAL artifact");
    add_common(plan);
    plan->add_option("--epsilon", cfg.epsilon, "bilipschitz epsilon")->required();
    plan->add_option("--bigR", cfg.bigR, "ball radius R")->required();
    plan->add_option("--delta", cfg.delta,
                     "thick-part margin (the R-ball must lie in the delta/(1+epsilon)-thick part)")
        ->required();

    CLI::App* render = app.add_subcommand("render", "SVG renders for a nerve (with dimer)");
    add_common(render);
    add_solver(render);
    render->add_flag("--no-reduce", cfg.no_reduce, "keep multiple strand components");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kParseError;
    }

    if (!geometry_name.empty()) {
        auto g = geometry_from_string(geometry_name);
        if (!g) {
            std::cerr << "unknown geometry: " << geometry_name << "\n";
            return kValidationError;
        }
        cfg.geometry = *g;
    }

    if (pack->parsed()) return cmd_pack(cfg, std::cerr);
    if (build->parsed()) return cmd_build(cfg, std::cerr);
    if (plan->parsed()) return cmd_plan(cfg, std::cerr);
    if (render->parsed()) return cmd_render(cfg, std::cerr);
    return kValidationError;
}
