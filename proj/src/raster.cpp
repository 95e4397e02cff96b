#include "figkit/raster.hpp"

#include <algorithm>
#include <cmath>

namespace figkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDashOn = 7.0;
constexpr double kDashPeriod = 12.0;

// 5x7 dot matrix glyphs, one byte per row, bit 4 = leftmost column.
struct Glyph {
    char ch;
    uint8_t rows[7];
};

const Glyph kFont[] = {
    {'A', {0x0e, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11}},
    {'B', {0x1e, 0x11, 0x11, 0x1e, 0x11, 0x11, 0x1e}},
    {'C', {0x0e, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0e}},
    {'D', {0x1e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1e}},
    {'E', {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f}},
    {'F', {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x10}},
    {'G', {0x0e, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0f}},
    {'H', {0x11, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11}},
    {'I', {0x0e, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0c}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1f}},
    {'M', {0x11, 0x1b, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e}},
    {'P', {0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10}},
    {'Q', {0x0e, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0d}},
    {'R', {0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11}},
    {'S', {0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e}},
    {'T', {0x1f, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0a, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0a}},
    {'X', {0x11, 0x11, 0x0a, 0x04, 0x0a, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0a, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1f}},
    {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
    {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
    {'3', {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e}},
    {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
    {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
    {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
    {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
    {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
};

const Glyph* find_glyph(char c) {
    for (const auto& g : kFont) {
        if (g.ch == c) return &g;
    }
    return nullptr;
}

double wrap_positive(double a) {
    while (a < 0) a += 2 * kPi;
    while (a >= 2 * kPi) a -= 2 * kPi;
    return a;
}

}  // namespace

Canvas::Canvas(int width, int height) {
    image_.width = width;
    image_.height = height;
    image_.rgb.assign(static_cast<size_t>(width) * height * 3, 0xff);
}

void Canvas::plot(int x, int y, Rgb color) {
    if (x < 0 || y < 0 || x >= image_.width || y >= image_.height) return;
    uint8_t* p = image_.px(x, y);
    p[0] = color.r;
    p[1] = color.g;
    p[2] = color.b;
}

void Canvas::draw_segment(Vec2 a, Vec2 b, double width, Rgb color, bool dashed) {
    double half = width / 2.0;
    Vec2 d = b - a;
    double len2 = dot(d, d);
    int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) - half - 1));
    int x1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + half + 1));
    int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) - half - 1));
    int y1 = static_cast<int>(std::ceil(std::max(a.y, b.y) + half + 1));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            Vec2 p{x + 0.5, y + 0.5};
            double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
            Vec2 closest = a + d * t;
            if (dist(p, closest) > half) continue;
            if (dashed) {
                double s = t * std::sqrt(len2);
                if (std::fmod(s, kDashPeriod) >= kDashOn) continue;
            }
            plot(x, y, color);
        }
    }
}

void Canvas::draw_circle_outline(Vec2 center, double r, double width, Rgb color,
                                 bool dashed) {
    double half = width / 2.0;
    int x0 = static_cast<int>(std::floor(center.x - r - half - 1));
    int x1 = static_cast<int>(std::ceil(center.x + r + half + 1));
    int y0 = static_cast<int>(std::floor(center.y - r - half - 1));
    int y1 = static_cast<int>(std::ceil(center.y + r + half + 1));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            Vec2 p{x + 0.5, y + 0.5};
            double d = dist(p, center);
            if (std::abs(d - r) > half) continue;
            if (dashed) {
                double arclen = wrap_positive(angle_of(p - center)) * r;
                if (std::fmod(arclen, kDashPeriod) >= kDashOn) continue;
            }
            plot(x, y, color);
        }
    }
}

void Canvas::draw_arc(Vec2 center, double r, double start_angle, double sweep,
                      double width, Rgb color) {
    double half = width / 2.0;
    int x0 = static_cast<int>(std::floor(center.x - r - half - 1));
    int x1 = static_cast<int>(std::ceil(center.x + r + half + 1));
    int y0 = static_cast<int>(std::floor(center.y - r - half - 1));
    int y1 = static_cast<int>(std::ceil(center.y + r + half + 1));
    double lo = std::min(0.0, sweep), hi = std::max(0.0, sweep);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            Vec2 p{x + 0.5, y + 0.5};
            double d = dist(p, center);
            if (std::abs(d - r) > half) continue;
            double rel = wrap_angle(angle_of(p - center) - start_angle);
            if (rel < lo || rel > hi) continue;
            plot(x, y, color);
        }
    }
}

void Canvas::fill_disc(Vec2 center, double r, Rgb color) {
    int x0 = static_cast<int>(std::floor(center.x - r - 1));
    int x1 = static_cast<int>(std::ceil(center.x + r + 1));
    int y0 = static_cast<int>(std::floor(center.y - r - 1));
    int y1 = static_cast<int>(std::ceil(center.y + r + 1));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            Vec2 p{x + 0.5, y + 0.5};
            if (dist(p, center) <= r) plot(x, y, color);
        }
    }
}

void Canvas::draw_ring(Vec2 center, double r, double width, Rgb color) {
    fill_disc(center, r, {0xff, 0xff, 0xff});
    draw_circle_outline(center, r, width, color, false);
}

double Canvas::text_width(const std::string& content, int font_size) {
    double sx = font_size / 7.0;
    return static_cast<double>(content.size()) * 6.0 * sx;
}

double Canvas::text_height(int font_size) { return font_size; }

void Canvas::draw_text(Vec2 top_left, const std::string& content, int font_size,
                       Rgb color) {
    double sx = font_size / 7.0;
    double pen = top_left.x;
    for (char c : content) {
        const Glyph* g = find_glyph(c);
        if (g) {
            for (int row = 0; row < 7; ++row) {
                for (int col = 0; col < 5; ++col) {
                    if (!(g->rows[row] & (1 << (4 - col)))) continue;
                    int px0 = static_cast<int>(std::floor(pen + col * sx));
                    int px1 = static_cast<int>(std::floor(pen + (col + 1) * sx - 1e-9));
                    int py0 = static_cast<int>(std::floor(top_left.y + row * sx));
                    int py1 =
                        static_cast<int>(std::floor(top_left.y + (row + 1) * sx - 1e-9));
                    for (int y = py0; y <= py1; ++y) {
                        for (int x = px0; x <= px1; ++x) plot(x, y, color);
                    }
                }
            }
        }
        pen += 6.0 * sx;
    }
}

}  // namespace figkit
