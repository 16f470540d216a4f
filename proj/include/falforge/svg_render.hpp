#pragma once

#include <string>

#include "falforge/link.hpp"
#include "falforge/nerve.hpp"
#include "falforge/packing.hpp"

namespace falforge {

/// Packing debug picture: vertex circles solid, per-face dual circles
/// dashed. Byte-deterministic for a given layout.
std::string render_packing_svg(const Nerve& N, const Layout& lyt, bool show_duals = true);

/// Link diagram read off the matched dual graph: crossing-circle glyphs at
/// the colored-edge tangencies, strand arcs through the uncolored-edge
/// tangencies, half-twist ticks. Throws ValidationError on an empty diagram.
std::string render_diagram_svg(const Nerve& N, const Layout& lyt, const FALDiagram& F);

} // namespace falforge
