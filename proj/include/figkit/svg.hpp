#pragma once

#include <string>

#include "figkit/vec2.hpp"

namespace figkit {

// Minimal deterministic SVG 1.1 composer. Coordinates are pixels, two
// decimals, elements appear exactly in call order.
class SvgBuilder {
public:
    SvgBuilder(int width, int height);

    void segment(const std::string& id, Vec2 a, Vec2 b, double width,
                 const std::string& color, bool dashed);
    void circle_outline(const std::string& id, Vec2 center, double r,
                        double width, const std::string& color, bool dashed);
    void arc(const std::string& id, Vec2 center, double r, double start_angle,
             double sweep, double width, const std::string& color);
    void corner_mark(const std::string& id, Vec2 a, Vec2 b, Vec2 c, double width,
                     const std::string& color);
    void disc(const std::string& id, Vec2 center, double r,
              const std::string& color);
    void ring(const std::string& id, Vec2 center, double r, double width,
              const std::string& color);
    void text(const std::string& id, Vec2 top_left, const std::string& content,
              int font_size, const std::string& color);

    std::string finish() const;

private:
    std::string body_;
    int width_;
    int height_;
};

}  // namespace figkit
