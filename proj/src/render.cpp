#include "figkit/render.hpp"

#include <algorithm>
#include <cmath>

#include "figkit/raster.hpp"
#include "figkit/svg.hpp"

namespace figkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMarginPx = 30.0;
constexpr double kLabelClearance = 10.0;

struct Viewport {
    Vec2 center;   // rotated-world center of the fit box
    double scale;  // world units -> px
    double rotation;

    Vec2 to_px(Vec2 world) const {
        Vec2 r = rotate(world, rotation) - center;
        // y flips: world y-up, raster y-down.
        return {256.0 + r.x * scale, 256.0 - r.y * scale};
    }
};

// Fit rotated points plus circle extents into the margin box.
Viewport make_viewport(const FigureRealization& fig, double rotation) {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    auto grow = [&](Vec2 p, double pad) {
        xlo = std::min(xlo, p.x - pad);
        xhi = std::max(xhi, p.x + pad);
        ylo = std::min(ylo, p.y - pad);
        yhi = std::max(yhi, p.y + pad);
    };
    for (const auto& p : fig.points) grow(rotate(p.pos, rotation), 0.0);
    for (const auto& e : fig.derived) {
        if (e.kind == ElementKind::circle) {
            grow(rotate(e.anchors[0], rotation), e.radius);
        }
    }
    double w = std::max({xhi - xlo, yhi - ylo, 1e-9});
    Viewport vp;
    vp.center = {(xlo + xhi) / 2.0, (ylo + yhi) / 2.0};
    vp.scale = (kCanvasSize - 2.0 * kMarginPx) / w;
    vp.rotation = rotation;
    return vp;
}

std::string upper_label(const std::string& name) {
    std::string out;
    for (char c : name) {
        out += (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
    }
    return out;
}

double seg_point_dist(Vec2 a, Vec2 b, Vec2 p) {
    Vec2 d = b - a;
    double len2 = dot(d, d);
    double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    return dist(p, a + d * t);
}

struct PxSegment {
    Vec2 a, b;
};

// Compass offsets tried in fixed order: E, NE, N, NW, W, SW, S, SE.
Vec2 compass_offset(int i, double d, double w, double h) {
    switch (i) {
        case 0: return {d + 2, -h / 2};
        case 1: return {d, -d - h};
        case 2: return {-w / 2, -d - h};
        case 3: return {-d - w, -d - h};
        case 4: return {-d - 2 - w, -h / 2};
        case 5: return {-d - w, d};
        case 6: return {-w / 2, d};
        default: return {d, d};
    }
}

}  // namespace

RenderedStep render_step(const FigureRealization& fig, int upto_statement,
                         const StyleParams& style) {
    RenderedStep step;
    step.step_index = upto_statement;

    Viewport vp = make_viewport(fig, style.rotation);
    SvgBuilder svg(kCanvasSize, kCanvasSize);
    Canvas canvas(kCanvasSize, kCanvasSize);

    std::vector<PxSegment> drawn_segments;
    int elements = 0;

    // Derived elements in introduction order (already deduplicated).
    for (const auto& e : fig.derived) {
        if (e.statement_index > upto_statement) continue;
        Rgb rgb = style.color_for_statement(e.statement_index);
        std::string color = rgb.hex();
        bool dashed = style.line_style_for(e.statement_index, e.id) ==
                      LineStyle::dashed;
        double w = style.stroke_width;

        switch (e.kind) {
            case ElementKind::segment: {
                Vec2 a = vp.to_px(e.anchors[0]);
                Vec2 b = vp.to_px(e.anchors[1]);
                svg.segment(e.id, a, b, w, color, dashed);
                canvas.draw_segment(a, b, w, rgb, dashed);
                drawn_segments.push_back({a, b});
                break;
            }
            case ElementKind::line_through: {
                // Span of the anchors, pushed out a little on both ends.
                std::vector<Vec2> px;
                for (auto a : e.anchors) px.push_back(vp.to_px(a));
                Vec2 d{0, 0};
                for (size_t i = 1; i < px.size() && norm(d) < 1e-9; ++i) {
                    d = px[i] - px[0];
                }
                if (norm(d) < 1e-9) break;
                d = unit(d);
                double tlo = 0, thi = 0;
                for (auto p : px) {
                    double t = dot(p - px[0], d);
                    tlo = std::min(tlo, t);
                    thi = std::max(thi, t);
                }
                Vec2 a = px[0] + d * (tlo - 12.0);
                Vec2 b = px[0] + d * (thi + 12.0);
                svg.segment(e.id, a, b, w, color, dashed);
                canvas.draw_segment(a, b, w, rgb, dashed);
                drawn_segments.push_back({a, b});
                break;
            }
            case ElementKind::circle: {
                Vec2 c = vp.to_px(e.anchors[0]);
                double r = e.radius * vp.scale;
                svg.circle_outline(e.id, c, r, w, color, dashed);
                canvas.draw_circle_outline(c, r, w, rgb, dashed);
                break;
            }
            case ElementKind::angle_mark: {
                Vec2 v = vp.to_px(e.anchors[0]);
                Vec2 r1 = vp.to_px(e.anchors[1]);
                Vec2 r2 = vp.to_px(e.anchors[2]);
                double reach = std::min(dist(v, r1), dist(v, r2));
                double radius = std::clamp(0.22 * reach, 10.0, 24.0);
                double a0 = angle_of(r1 - v);
                double sweep = wrap_angle(angle_of(r2 - v) - a0);
                svg.arc(e.id, v, radius, a0, sweep, std::max(1.0, w * 0.75), color);
                canvas.draw_arc(v, radius, a0, sweep, std::max(1.0, w * 0.75), rgb);
                break;
            }
            case ElementKind::right_angle_mark: {
                Vec2 v = vp.to_px(e.anchors[0]);
                Vec2 u1 = unit(vp.to_px(e.anchors[1]) - v);
                Vec2 u2 = unit(vp.to_px(e.anchors[2]) - v);
                double m = std::clamp(
                    0.18 * std::min(dist(v, vp.to_px(e.anchors[1])),
                                    dist(v, vp.to_px(e.anchors[2]))),
                    7.0, 16.0);
                Vec2 pa = v + u1 * m;
                Vec2 pb = v + u1 * m + u2 * m;
                Vec2 pc = v + u2 * m;
                svg.corner_mark(e.id, pa, pb, pc, std::max(1.0, w * 0.75), color);
                canvas.draw_segment(pa, pb, std::max(1.0, w * 0.75), rgb, false);
                canvas.draw_segment(pb, pc, std::max(1.0, w * 0.75), rgb, false);
                break;
            }
        }
        ++elements;
    }

    // Point markers.
    std::vector<std::pair<std::string, Vec2>> marker_px;
    const Rgb black{0x1a, 0x1a, 0x1a};
    for (const auto& p : fig.points) {
        if (p.statement_index > upto_statement) continue;
        Vec2 c = vp.to_px(p.pos);
        marker_px.push_back({p.name, c});
        if (style.point_marker == PointMarker::dot) {
            svg.disc("pt-" + p.name, c, 3.0, black.hex());
            canvas.fill_disc(c, 3.0, black);
        } else {
            svg.ring("pt-" + p.name, c, 3.5, 1.2, black.hex());
            canvas.draw_ring(c, 3.5, 1.2, black);
        }
        ++elements;
    }

    // Labels: first compass offset whose box keeps clear of markers and
    // strokes; fall back to east with a warning.
    for (const auto& [name, c] : marker_px) {
        std::string text = upper_label(name);
        double tw = Canvas::text_width(text, style.font_size);
        double th = Canvas::text_height(style.font_size);
        double d = 7.0;

        Vec2 chosen{};
        bool placed = false;
        auto forced = style.label_offsets.find(name);
        if (forced != style.label_offsets.end()) {
            chosen = c + forced->second;
            placed = true;
        }
        for (int i = 0; i < 8 && !placed; ++i) {
            Vec2 pos = c + compass_offset(i, d, tw, th);
            Vec2 probes[5] = {pos,
                              pos + Vec2{tw, 0},
                              pos + Vec2{0, th},
                              pos + Vec2{tw, th},
                              pos + Vec2{tw / 2, th / 2}};
            bool clear = true;
            for (const auto& probe : probes) {
                for (const auto& [oname, oc] : marker_px) {
                    if (oname != name && dist(probe, oc) < kLabelClearance) {
                        clear = false;
                    }
                }
                if (!clear) break;
                for (const auto& seg : drawn_segments) {
                    if (seg_point_dist(seg.a, seg.b, probe) < kLabelClearance) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) break;
            }
            if (clear) {
                chosen = pos;
                placed = true;
            }
        }
        if (!placed) {
            chosen = c + compass_offset(0, d, tw, th);
            step.label_warning = true;
        }
        chosen.x = std::clamp(chosen.x, 2.0, kCanvasSize - tw - 2.0);
        chosen.y = std::clamp(chosen.y, 2.0, kCanvasSize - th - 2.0);
        svg.text("lbl-" + name, chosen, text, style.font_size, black.hex());
        canvas.draw_text(chosen, text, style.font_size, black);
    }

    step.elements_drawn = elements;
    step.svg = svg.finish();
    step.png = encode_png(canvas.image());
    return step;
}

std::vector<RenderedStep> render_trajectory(const ConstructionProgram& program,
                                            uint64_t realization_seed,
                                            uint64_t render_seed,
                                            const RealizeOptions& options) {
    FigureRealization fig = realize(program, realization_seed, options);
    StyleParams style = style_from_seed(render_seed);
    std::vector<RenderedStep> steps;
    for (size_t k = 0; k < program.statements.size(); ++k) {
        steps.push_back(render_step(fig, static_cast<int>(k), style));
    }
    return steps;
}

std::string blank_canvas_png() {
    Canvas canvas(kCanvasSize, kCanvasSize);
    return encode_png(canvas.image());
}

}  // namespace figkit
