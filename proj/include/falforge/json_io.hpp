#pragma once

#include <optional>
#include <string>
#include <vector>

#include "falforge/filling.hpp"
#include "falforge/link.hpp"
#include "falforge/nerve.hpp"
#include "falforge/packing.hpp"
#include "falforge/scoop.hpp"

namespace falforge {

// Canonical form throughout: objects with alphabetically sorted keys,
// two-space indentation, shortest round-trip number formatting. Golden tests
// compare bytes.

struct NerveFile {
    Nerve nerve;
    std::optional<Dimer> dimer;
};

/// Parse {"vertices": n, "faces": [[i,j,k],...], "dimer": [edge,...]}.
/// Throws ParseError on malformed documents. Edge indices refer to the
/// canonical edge order (sorted endpoint pairs, lexicographic).
NerveFile parse_nerve_json(const std::string& text);
NerveFile read_nerve_file(const std::string& path);
std::string nerve_to_json(const Nerve& N, const Dimer* D = nullptr);

std::string label_to_json(const Nerve& N, const PackingLabel& L, const SolveStats& stats);
std::string layout_to_json(const Nerve& N, const Layout& lyt);
std::string scoop_to_json(const ScoopComplex& S, const FiniteVolumeReport& rep);
std::string fal_to_json(const FALDiagram& F, const ComponentPartition& P,
                        const std::vector<CuspShape>& cusps);
std::string plan_to_json(const SlopePlan& plan, const Certificate& cert);

/// The slice of a FAL artifact the planner needs.
struct FALFile {
    int genus = 0;
    int strand_count = 0;
    int component_count = 0;
    std::vector<CuspShape> cusps; // per crossing circle, with half-twist flags
};
FALFile parse_fal_json(const std::string& text);
FALFile read_fal_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace falforge
