#include "figkit/svg.hpp"

#include <cmath>
#include <cstdio>

namespace figkit {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string dash_attr(bool dashed) {
    return dashed ? " stroke-dasharray=\"7 5\"" : "";
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

SvgBuilder::SvgBuilder(int width, int height) : width_(width), height_(height) {
    body_ += "<rect id=\"bg\" width=\"" + std::to_string(width) +
             "\" height=\"" + std::to_string(height) + "\" fill=\"#ffffff\"/>\n";
}

void SvgBuilder::segment(const std::string& id, Vec2 a, Vec2 b, double width,
                         const std::string& color, bool dashed) {
    body_ += "<line id=\"" + id + "\" x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) +
             "\" x2=\"" + num(b.x) + "\" y2=\"" + num(b.y) + "\" stroke=\"" +
             color + "\" stroke-width=\"" + num(width) +
             "\" stroke-linecap=\"round\"" + dash_attr(dashed) + "/>\n";
}

void SvgBuilder::circle_outline(const std::string& id, Vec2 center, double r,
                                double width, const std::string& color,
                                bool dashed) {
    body_ += "<circle id=\"" + id + "\" cx=\"" + num(center.x) + "\" cy=\"" +
             num(center.y) + "\" r=\"" + num(r) + "\" fill=\"none\" stroke=\"" +
             color + "\" stroke-width=\"" + num(width) + "\"" +
             dash_attr(dashed) + "/>\n";
}

void SvgBuilder::arc(const std::string& id, Vec2 center, double r,
                     double start_angle, double sweep, double width,
                     const std::string& color) {
    Vec2 p0 = center + dir(start_angle) * r;
    Vec2 p1 = center + dir(start_angle + sweep) * r;
    int large = std::abs(sweep) > 3.14159265358979323846 ? 1 : 0;
    int flag = sweep > 0 ? 1 : 0;
    body_ += "<path id=\"" + id + "\" d=\"M " + num(p0.x) + " " + num(p0.y) +
             " A " + num(r) + " " + num(r) + " 0 " + std::to_string(large) +
             " " + std::to_string(flag) + " " + num(p1.x) + " " + num(p1.y) +
             "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             num(width) + "\"/>\n";
}

void SvgBuilder::corner_mark(const std::string& id, Vec2 a, Vec2 b, Vec2 c,
                             double width, const std::string& color) {
    body_ += "<polyline id=\"" + id + "\" points=\"" + num(a.x) + "," +
             num(a.y) + " " + num(b.x) + "," + num(b.y) + " " + num(c.x) + "," +
             num(c.y) + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgBuilder::disc(const std::string& id, Vec2 center, double r,
                      const std::string& color) {
    body_ += "<circle id=\"" + id + "\" cx=\"" + num(center.x) + "\" cy=\"" +
             num(center.y) + "\" r=\"" + num(r) + "\" fill=\"" + color +
             "\"/>\n";
}

void SvgBuilder::ring(const std::string& id, Vec2 center, double r, double width,
                      const std::string& color) {
    body_ += "<circle id=\"" + id + "\" cx=\"" + num(center.x) + "\" cy=\"" +
             num(center.y) + "\" r=\"" + num(r) + "\" fill=\"#ffffff\" stroke=\"" +
             color + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgBuilder::text(const std::string& id, Vec2 top_left,
                      const std::string& content, int font_size,
                      const std::string& color) {
    // SVG text anchors at the baseline; the raster path anchors at the box
    // top-left, so shift by an ascent-ish amount to keep them aligned.
    body_ += "<text id=\"" + id + "\" x=\"" + num(top_left.x) + "\" y=\"" +
             num(top_left.y + font_size * 0.8) + "\" font-family=\"sans-serif\"" +
             " font-size=\"" + std::to_string(font_size) + "\" fill=\"" + color +
             "\">" + escape_text(content) + "</text>\n";
}

std::string SvgBuilder::finish() const {
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
        std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
        "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
        std::to_string(height_) + "\">\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

}  // namespace figkit
