#pragma once

#include <string>

#include "lbdx/corpus.hpp"
#include "lbdx/discovery.hpp"
#include "lbdx/layout.hpp"

namespace lbdx::render {

/// Fill color per concept class: a red, b yellow, c blue.
std::string class_color(corpus::ConceptClass c);

/// Graphviz `graph` with one node per member (label = surface form, fill =
/// class color) and one edge per MST edge.
std::string entry_point_dot(const discovery::EntryPoint &ep, const corpus::Vocabulary &vocab);

/// Standalone SVG of an entry point at its layout coordinates. Label font
/// size grows with the token's document frequency.
std::string entry_point_svg(const discovery::EntryPoint &ep, const layout::LayoutResult &layout,
                            const corpus::Vocabulary &vocab, int size_px = 480);

}  // namespace lbdx::render
