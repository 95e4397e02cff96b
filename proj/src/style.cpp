#include "figkit/style.hpp"

#include <cstdio>

#include "figkit/rng.hpp"

namespace figkit {

namespace {

// Dark strokes that stay readable on white at 512x512.
const Rgb kMasterPalette[] = {
    {0x1a, 0x1a, 0x1a}, {0x1d, 0x35, 0x57}, {0x6a, 0x1b, 0x9a},
    {0x00, 0x69, 0x5c}, {0xb7, 0x1c, 0x1c}, {0x4e, 0x34, 0x2e},
    {0x28, 0x35, 0xb5},
};

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::string Rgb::hex() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

Rgb StyleParams::color_for_statement(int statement_index) const {
    if (palette.empty()) return {0, 0, 0};
    if (statement_index <= 0) return palette[0];
    uint64_t h = hash_combine({seed, 0xc010u, static_cast<uint64_t>(statement_index)});
    return palette[h % palette.size()];
}

LineStyle StyleParams::line_style_for(int statement_index,
                                      const std::string& element_id) const {
    if (statement_index <= 0) return LineStyle::solid;
    uint64_t h = seed;
    for (char c : element_id) h = mix64(h ^ static_cast<uint64_t>(c));
    h = hash_combine({h, 0xda54u, static_cast<uint64_t>(statement_index)});
    // Auxiliary elements go dashed about a quarter of the time.
    return (h % 100) < 25 ? LineStyle::dashed : LineStyle::solid;
}

StyleParams style_from_seed(uint64_t seed) {
    Rng rng(hash_combine({seed, 0x57a1eULL}));
    StyleParams style;
    style.seed = seed;
    style.rotation = rng.uniform(0.0, kTwoPi);
    if (style.rotation >= kTwoPi) style.rotation = 0.0;
    style.stroke_width = 1.0 + 0.5 * static_cast<double>(rng.below(7));  // 1..4
    style.point_marker = rng.chance(0.7) ? PointMarker::dot : PointMarker::circle;
    const int sizes[] = {12, 14, 16};
    style.font_size = sizes[rng.below(3)];

    // Primary color first, then a small rotating auxiliary palette.
    size_t master = std::size(kMasterPalette);
    size_t start = rng.below(master);
    for (size_t i = 0; i < 4; ++i) {
        style.palette.push_back(kMasterPalette[(start + i * 2) % master]);
    }
    return style;
}

}  // namespace figkit
