#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "figkit/lang.hpp"
#include "figkit/realize.hpp"
#include "figkit/style.hpp"

namespace figkit {

inline constexpr int kCanvasSize = 512;

struct RenderedStep {
    int step_index = 0;
    std::string svg;   // vector document bytes
    std::string png;   // 512x512 8-bit RGB raster bytes
    int elements_drawn = 0;
    bool label_warning = false;  // placement fell back after all offsets
};

// Draws exactly the elements introduced by statements 0..upto_statement.
// The viewport transform comes from the whole figure so steps of one
// trajectory stay registered. Byte-deterministic in (fig, upto, style).
RenderedStep render_step(const FigureRealization& fig, int upto_statement,
                         const StyleParams& style);

// One step per statement; shared realization and style across steps.
std::vector<RenderedStep> render_trajectory(const ConstructionProgram& program,
                                            uint64_t realization_seed,
                                            uint64_t render_seed,
                                            const RealizeOptions& options = {});

// All-white 512x512 canvas used as the before-image of first edit steps.
std::string blank_canvas_png();

}  // namespace figkit
