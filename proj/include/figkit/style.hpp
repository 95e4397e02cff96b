#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "figkit/vec2.hpp"

namespace figkit {

enum class LineStyle : uint8_t { solid, dashed };
enum class PointMarker : uint8_t { dot, circle };

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    std::string hex() const;
};

struct StyleParams {
    uint64_t seed = 0;
    double rotation = 0.0;      // [0, 2*pi)
    double stroke_width = 2.0;  // [1, 4] px
    PointMarker point_marker = PointMarker::dot;
    int font_size = 14;  // px
    std::vector<Rgb> palette;
    // Optional per-point overrides; empty by default, placement fills in the
    // rest at render time.
    std::map<std::string, Vec2> label_offsets;

    // Per-element styling, keyed by the element's introducing statement.
    Rgb color_for_statement(int statement_index) const;
    LineStyle line_style_for(int statement_index, const std::string& element_id) const;
};

// Deterministic visual parameters from a render seed.
StyleParams style_from_seed(uint64_t seed);

}  // namespace figkit
