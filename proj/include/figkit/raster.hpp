#pragma once

#include <string>

#include "figkit/png_codec.hpp"
#include "figkit/style.hpp"
#include "figkit/vec2.hpp"

namespace figkit {

// Software canvas mirroring the SVG composer. Hard-edged coverage tests
// keep the output byte-deterministic.
class Canvas {
public:
    Canvas(int width, int height);

    void draw_segment(Vec2 a, Vec2 b, double width, Rgb color, bool dashed);
    void draw_circle_outline(Vec2 center, double r, double width, Rgb color,
                             bool dashed);
    void draw_arc(Vec2 center, double r, double start_angle, double sweep,
                  double width, Rgb color);
    void fill_disc(Vec2 center, double r, Rgb color);
    void draw_ring(Vec2 center, double r, double width, Rgb color);
    void draw_text(Vec2 top_left, const std::string& content, int font_size,
                   Rgb color);

    static double text_width(const std::string& content, int font_size);
    static double text_height(int font_size);

    const Image& image() const { return image_; }

private:
    void plot(int x, int y, Rgb color);
    Image image_;
};

}  // namespace figkit
