#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "falforge/packing.hpp"

namespace falforge {

// Exit codes shared by all subcommands.
enum ExitCode : int {
    kOk = 0,
    kParseError = 2,
    kValidationError = 3,
    kNumericError = 4,
    kAuditError = 5,
};

struct PipelineConfig {
    std::string input;  // nerve JSON (pack/build/render) or FAL JSON (plan)
    std::string out_dir = ".";
    std::optional<PackGeometry> geometry; // default: inferred from genus
    double tol = 1e-10;
    long max_iters = 1000000;
    double epsilon = 0.0;
    double bigR = 1.0;
    double delta = 0.0;
    bool no_reduce = false;
    bool render = false;
};

/// Solve the packing for a nerve file and write label/layout artifacts plus
/// a residual report. Returns an ExitCode; diagnostics go to `log`.
int cmd_pack(const PipelineConfig& cfg, std::ostream& log);

/// Full construction: pack (subdividing for a dimer when the input has
/// none), build the scoop complex, synthesize the link diagram, reduce to a
/// knot unless --no-reduce. Writes scoop/FAL artifacts and optional SVGs.
int cmd_build(const PipelineConfig& cfg, std::ostream& log);

/// Effective filling plan and certificate for a FAL artifact.
int cmd_plan(const PipelineConfig& cfg, std::ostream& log);

/// Re-run the construction and emit only the SVG renders.
int cmd_render(const PipelineConfig& cfg, std::ostream& log);

} // namespace falforge
