#include "figkit/realize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "figkit/rng.hpp"

namespace figkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

double figure_scale(const std::vector<RealizedPoint>& pts) {
    if (pts.empty()) return 1.0;
    double xlo = pts[0].pos.x, xhi = pts[0].pos.x;
    double ylo = pts[0].pos.y, yhi = pts[0].pos.y;
    for (const auto& p : pts) {
        xlo = std::min(xlo, p.pos.x);
        xhi = std::max(xhi, p.pos.x);
        ylo = std::min(ylo, p.pos.y);
        yhi = std::max(yhi, p.pos.y);
    }
    return std::max({xhi - xlo, yhi - ylo, 1e-9});
}

[[noreturn]] void inconsistent(int stmt, const std::string& msg) {
    throw RealizeError(RealizeError::Kind::inconsistent_constraints, stmt, msg);
}

// Solve [a b; c d] x = [e; f].
Vec2 solve2x2(double a, double b, double c, double d, double e, double f,
              int stmt, const char* what) {
    double det = a * d - b * c;
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), 1e-30});
    if (std::abs(det) < 1e-12 * scale * scale) inconsistent(stmt, what);
    return {(e * d - b * f) / det, (a * f - e * c) / det};
}

Vec2 line_intersect(Vec2 p, Vec2 dp, Vec2 q, Vec2 dq, int stmt) {
    // p + t*dp == q + s*dq
    double denom = cross(dp, dq);
    double scale = std::max(norm(dp) * norm(dq), 1e-30);
    if (std::abs(denom) < 1e-12 * scale) inconsistent(stmt, "parallel lines");
    double t = cross(q - p, dq) / denom;
    return p + dp * t;
}

Vec2 foot_point(Vec2 a, Vec2 b, Vec2 c, int stmt) {
    Vec2 d = c - b;
    double n2 = dot(d, d);
    if (n2 < 1e-24) inconsistent(stmt, "foot onto a zero-length line");
    double t = dot(a - b, d) / n2;
    return b + d * t;
}

// Signed perpendicular distance of x from the directed edge u->v.
double signed_edge_dist(Vec2 u, Vec2 v, Vec2 x) {
    return cross(unit(v - u), x - u);
}

}  // namespace

Vec2 FigureRealization::coord(std::string_view name) const {
    const RealizedPoint* p = find(name);
    return p ? p->pos : Vec2{};
}

const RealizedPoint* FigureRealization::find(std::string_view name) const {
    for (const auto& p : points) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

std::vector<Vec2> closed_form_points(RelationKind kind,
                                     const std::vector<Vec2>& in) {
    using RK = RelationKind;
    switch (kind) {
        case RK::circle:
        case RK::circumcenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            return {solve2x2(2 * (b.x - a.x), 2 * (b.y - a.y),
                             2 * (c.x - b.x), 2 * (c.y - b.y),
                             dot(b, b) - dot(a, a), dot(c, c) - dot(b, b), -1,
                             "collinear points have no circumcenter")};
        }
        case RK::eq_triangle: {
            Vec2 b = in[0], c = in[1];
            return {b + rotate(c - b, kPi / 3.0)};
        }
        case RK::foot:
            return {foot_point(in[0], in[1], in[2], -1)};
        case RK::incenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
            double s = la + lb + lc;
            if (s < 1e-24) inconsistent(-1, "degenerate triangle");
            return {(a * la + b * lb + c * lc) / s};
        }
        case RK::excenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
            double s = -la + lb + lc;
            if (std::abs(s) < 1e-12 * (la + lb + lc)) {
                inconsistent(-1, "degenerate triangle for excenter");
            }
            return {(a * -la + b * lb + c * lc) / s};
        }
        case RK::intersection_cc: {
            Vec2 o = in[0], w = in[1], a = in[2];
            if (dist(o, w) < 1e-24) inconsistent(-1, "concentric circles");
            Vec2 f = foot_point(a, o, w, -1);
            return {f * 2.0 - a};
        }
        case RK::intersection_lc: {
            Vec2 a = in[0], o = in[1], b = in[2];
            Vec2 d = a - b;
            double n2 = dot(d, d);
            if (n2 < 1e-24) inconsistent(-1, "zero-length chord line");
            double t = -2.0 * dot(d, b - o) / n2;
            return {b + d * t};
        }
        case RK::intersection_ll:
            return {line_intersect(in[0], in[1] - in[0], in[2], in[3] - in[2], -1)};
        case RK::intersection_lp:
            return {line_intersect(in[0], in[1] - in[0], in[2], in[4] - in[3], -1)};
        case RK::intersection_lt:
            return {line_intersect(in[0], in[1] - in[0], in[2], perp(in[4] - in[3]), -1)};
        case RK::intersection_pp:
            return {line_intersect(in[0], in[2] - in[1], in[3], in[5] - in[4], -1)};
        case RK::intersection_tt:
            return {line_intersect(in[0], perp(in[2] - in[1]), in[3], perp(in[5] - in[4]), -1)};
        case RK::midpoint:
            return {(in[0] + in[1]) / 2.0};
        case RK::mirror:
            return {in[1] * 2.0 - in[0]};
        case RK::nsquare:
            return {in[0] + rotate(in[1] - in[0], -kPi / 2.0)};
        case RK::psquare:
            return {in[0] + rotate(in[1] - in[0], kPi / 2.0)};
        case RK::orthocenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            Vec2 u = c - b, v = c - a;
            return {solve2x2(u.x, u.y, v.x, v.y, dot(u, a), dot(v, b), -1,
                             "collinear points have no orthocenter")};
        }
        case RK::parallelogram:
            return {in[0] + in[2] - in[1]};
        case RK::reflect: {
            Vec2 f = foot_point(in[0], in[1], in[2], -1);
            return {f * 2.0 - in[0]};
        }
        case RK::shift:
            return {in[0] + in[1] - in[2]};
        case RK::square: {
            Vec2 a = in[0], b = in[1];
            Vec2 up = perp(b - a);
            return {b + up, a + up};
        }
        case RK::trisegment: {
            Vec2 a = in[0], b = in[1];
            return {a + (b - a) / 3.0, a + (b - a) * (2.0 / 3.0)};
        }
        case RK::trisect: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double theta = wrap_angle(angle_of(c - b) - angle_of(a - b));
            if (std::abs(theta) < 1e-9 || std::abs(std::abs(theta) - kPi) < 1e-9) {
                inconsistent(-1, "cannot trisect a degenerate angle");
            }
            Vec2 u = unit(a - b);
            Vec2 x = line_intersect(b, rotate(u, theta / 3.0), a, c - a, -1);
            Vec2 y = line_intersect(b, rotate(u, 2.0 * theta / 3.0), a, c - a, -1);
            return {x, y};
        }
        case RK::tangent: {
            Vec2 a = in[0], o = in[1], b = in[2];
            double r = dist(o, b);
            double d = dist(a, o);
            if (r < 1e-24) inconsistent(-1, "tangent to a zero-radius circle");
            if (d <= r * (1.0 + 1e-12)) {
                inconsistent(-1, "tangent from a point inside the circle");
            }
            Vec2 u = unit(a - o);
            double ca = r / d;
            double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
            return {o + (u * ca + perp(u) * sa) * r,
                    o + (u * ca - perp(u) * sa) * r};
        }
        default:
            break;
    }
    inconsistent(-1, "no closed form for parametric construction");
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

std::vector<double> relation_residuals(RelationKind kind,
                                       const std::vector<Vec2>& in,
                                       const std::vector<Vec2>& news,
                                       double literal_deg, double L) {
    using RK = RelationKind;
    const double L2 = L * L;
    Vec2 x = news.empty() ? Vec2{} : news[0];
    switch (kind) {
        case RK::angle_bisector: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double lhs = wrap_angle(angle_of(a - b) - angle_of(x - b));
            double rhs = wrap_angle(angle_of(x - b) - angle_of(c - b));
            return {wrap_angle(lhs - rhs)};
        }
        case RK::angle_mirror: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double lhs = wrap_angle(angle_of(a - b) - angle_of(c - b));
            double rhs = wrap_angle(angle_of(c - b) - angle_of(x - b));
            return {wrap_angle(lhs - rhs)};
        }
        case RK::circle:
        case RK::circumcenter:
            return {(dist(x, in[0]) - dist(x, in[1])) / L,
                    (dist(x, in[1]) - dist(x, in[2])) / L};
        case RK::eq_triangle: {
            double s = dist(in[0], in[1]);
            return {(dist(x, in[0]) - s) / L, (dist(x, in[1]) - s) / L};
        }
        case RK::eqangle2: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double lhs = wrap_angle(angle_of(x - a) - angle_of(b - a));
            double rhs = wrap_angle(angle_of(b - c) - angle_of(x - c));
            return {wrap_angle(lhs - rhs)};
        }
        case RK::eqdistance:
            return {(dist(x, in[0]) - dist(in[1], in[2])) / L};
        case RK::foot: {
            Vec2 a = in[0], b = in[1], c = in[2];
            return {dot(x - a, c - b) / L2, cross(c - b, x - b) / L2};
        }
        case RK::incenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double d_ab = signed_edge_dist(a, b, x);
            double d_bc = signed_edge_dist(b, c, x);
            double d_ca = signed_edge_dist(c, a, x);
            return {(d_ab - d_bc) / L, (d_bc - d_ca) / L};
        }
        case RK::excenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            double d_ab = signed_edge_dist(a, b, x);
            double d_bc = signed_edge_dist(b, c, x);
            double d_ca = signed_edge_dist(c, a, x);
            return {(d_ab - d_ca) / L, (d_ab + d_bc) / L};
        }
        case RK::intersection_cc:
            return {(dist(x, in[0]) - dist(in[2], in[0])) / L,
                    (dist(x, in[1]) - dist(in[2], in[1])) / L};
        case RK::on_bline:
            return {(dist(x, in[0]) - dist(x, in[1])) / L};
        case RK::intersection_lc:
            return {cross(in[0] - in[2], x - in[2]) / L2,
                    (dist(x, in[1]) - dist(in[2], in[1])) / L};
        case RK::on_aline: {
            Vec2 a = in[0], b = in[1], c = in[2], d = in[3], e = in[4];
            double lhs = wrap_angle(angle_of(x - a) - angle_of(b - a));
            double rhs = wrap_angle(angle_of(c - d) - angle_of(e - d));
            return {wrap_angle(lhs - rhs)};
        }
        case RK::intersection_ll:
            return {cross(in[1] - in[0], x - in[0]) / L2,
                    cross(in[3] - in[2], x - in[2]) / L2};
        case RK::on_line:
            return {cross(in[1] - in[0], x - in[0]) / L2};
        case RK::intersection_lp:
            return {cross(in[1] - in[0], x - in[0]) / L2,
                    cross(in[4] - in[3], x - in[2]) / L2};
        case RK::intersection_lt:
            return {cross(in[1] - in[0], x - in[0]) / L2,
                    dot(in[4] - in[3], x - in[2]) / L2};
        case RK::intersection_pp:
            return {cross(in[2] - in[1], x - in[0]) / L2,
                    cross(in[5] - in[4], x - in[3]) / L2};
        case RK::intersection_tt:
            return {dot(in[2] - in[1], x - in[0]) / L2,
                    dot(in[5] - in[4], x - in[3]) / L2};
        case RK::lc_tangent:
            return {dot(x - in[0], in[0] - in[1]) / L2};
        case RK::midpoint: {
            Vec2 t = (in[0] + in[1]) / 2.0;
            return {(x.x - t.x) / L, (x.y - t.y) / L};
        }
        case RK::mirror: {
            Vec2 t = in[1] * 2.0 - in[0];
            return {(x.x - t.x) / L, (x.y - t.y) / L};
        }
        case RK::nsquare:
        case RK::psquare:
            return {(dist(x, in[0]) - dist(in[0], in[1])) / L,
                    dot(x - in[0], in[1] - in[0]) / L2};
        case RK::on_circle:
            return {(dist(x, in[0]) - dist(in[0], in[1])) / L};
        case RK::on_pline:
            return {cross(in[2] - in[1], x - in[0]) / L2};
        case RK::on_tline:
            return {dot(in[2] - in[1], x - in[0]) / L2};
        case RK::on_dia:
            return {dot(in[0] - x, in[1] - x) / L2};
        case RK::orthocenter: {
            Vec2 a = in[0], b = in[1], c = in[2];
            return {dot(x - a, c - b) / L2, dot(x - b, c - a) / L2};
        }
        case RK::parallelogram: {
            Vec2 t = in[0] + in[2] - in[1];
            return {(x.x - t.x) / L, (x.y - t.y) / L};
        }
        case RK::reflect: {
            Vec2 a = in[0], b = in[1], c = in[2];
            Vec2 m = (x + a) / 2.0;
            return {dot(x - a, c - b) / L2, cross(c - b, m - b) / L2};
        }
        case RK::s_angle: {
            Vec2 a = in[0], b = in[1];
            return {wrap_angle(angle_of(x - b) - angle_of(a - b) -
                               deg2rad(literal_deg))};
        }
        case RK::shift: {
            Vec2 t = in[0] + in[1] - in[2];
            return {(x.x - t.x) / L, (x.y - t.y) / L};
        }
        case RK::on_opline:
            return {cross(in[1] - in[0], x - in[0]) / L2};
        case RK::eqangle3: {
            Vec2 a = in[0], b = in[1], d = in[2], e = in[3], f = in[4];
            double seen = std::abs(wrap_angle(angle_of(a - x) - angle_of(b - x)));
            double ref = std::abs(wrap_angle(angle_of(e - d) - angle_of(f - d)));
            return {seen - ref};
        }
        case RK::on_circum: {
            Vec2 cc = closed_form_points(RelationKind::circumcenter, in)[0];
            return {(dist(x, cc) - dist(cc, in[0])) / L};
        }
        case RK::square: {
            Vec2 up = perp(in[1] - in[0]);
            Vec2 tx = in[1] + up, ty = in[0] + up;
            return {(news[0].x - tx.x) / L, (news[0].y - tx.y) / L,
                    (news[1].x - ty.x) / L, (news[1].y - ty.y) / L};
        }
        case RK::trisegment: {
            Vec2 tx = in[0] + (in[1] - in[0]) / 3.0;
            Vec2 ty = in[0] + (in[1] - in[0]) * (2.0 / 3.0);
            return {(news[0].x - tx.x) / L, (news[0].y - tx.y) / L,
                    (news[1].x - ty.x) / L, (news[1].y - ty.y) / L};
        }
        case RK::trisect: {
            Vec2 a = in[0], b = in[1], c = in[2];
            Vec2 xx = news[0], yy = news[1];
            double a1 = wrap_angle(angle_of(xx - b) - angle_of(a - b));
            double a2 = wrap_angle(angle_of(yy - b) - angle_of(xx - b));
            double a3 = wrap_angle(angle_of(c - b) - angle_of(yy - b));
            return {wrap_angle(a1 - a2), wrap_angle(a2 - a3),
                    cross(c - a, xx - a) / L2, cross(c - a, yy - a) / L2};
        }
        case RK::tangent: {
            Vec2 a = in[0], o = in[1], b = in[2];
            double r = dist(o, b);
            return {(dist(news[0], o) - r) / L, dot(news[0] - a, news[0] - o) / L2,
                    (dist(news[1], o) - r) / L, dot(news[1] - a, news[1] - o) / L2};
        }
    }
    return {};
}

namespace {

std::vector<double> primitive_residuals(PrimitiveKind kind,
                                        const std::vector<Vec2>& p, double L) {
    using PK = PrimitiveKind;
    const double L2 = L * L;
    switch (kind) {
        case PK::iso_triangle:
            return {(dist(p[0], p[1]) - dist(p[0], p[2])) / L};
        case PK::r_triangle:
            return {dot(p[1] - p[0], p[2] - p[0]) / L2};
        case PK::triangle_ab:
            return {(dist(p[0], p[2]) - 2.0 * dist(p[0], p[1])) / L};
        case PK::ieq_triangle:
            return {(dist(p[0], p[1]) - dist(p[1], p[2])) / L,
                    (dist(p[1], p[2]) - dist(p[2], p[0])) / L};
        case PK::risos:
            return {dot(p[1] - p[0], p[2] - p[0]) / L2,
                    (dist(p[0], p[1]) - dist(p[0], p[2])) / L};
        case PK::rectangle:
            return {dot(p[1] - p[0], p[3] - p[0]) / L2,
                    ((p[1] - p[0]) - (p[2] - p[3])).x / L,
                    ((p[1] - p[0]) - (p[2] - p[3])).y / L};
        case PK::isquare:
            return {dot(p[1] - p[0], p[3] - p[0]) / L2,
                    ((p[1] - p[0]) - (p[2] - p[3])).x / L,
                    ((p[1] - p[0]) - (p[2] - p[3])).y / L,
                    (dist(p[0], p[1]) - dist(p[0], p[3])) / L};
        case PK::trapezoid:
            return {cross(p[1] - p[0], p[2] - p[3]) / L2};
        case PK::r_trapezoid:
            return {cross(p[1] - p[0], p[2] - p[3]) / L2,
                    dot(p[1] - p[0], p[3] - p[0]) / L2};
        case PK::eq_trapezoid:
            return {cross(p[1] - p[0], p[2] - p[3]) / L2,
                    (dist(p[0], p[3]) - dist(p[1], p[2])) / L};
        case PK::eq_quadrangle:
            return {(dist(p[0], p[1]) - dist(p[1], p[2])) / L,
                    (dist(p[1], p[2]) - dist(p[2], p[3])) / L,
                    (dist(p[2], p[3]) - dist(p[3], p[0])) / L};
        case PK::eqdia_quadrangle:
            return {(dist(p[0], p[2]) - dist(p[1], p[3])) / L};
        case PK::eq_pentagon:
            return {(dist(p[0], p[1]) - dist(p[1], p[2])) / L,
                    (dist(p[1], p[2]) - dist(p[2], p[3])) / L,
                    (dist(p[2], p[3]) - dist(p[3], p[4])) / L,
                    (dist(p[3], p[4]) - dist(p[4], p[0])) / L};
        default:
            return {};
    }
}

// ---------------------------------------------------------------------------
// Primitive placement
// ---------------------------------------------------------------------------

std::vector<Vec2> sample_primitive(PrimitiveKind kind, Rng& rng) {
    using PK = PrimitiveKind;
    switch (kind) {
        case PK::segment:
            return {{0, 0}, {rng.uniform(0.8, 1.6), 0}};
        case PK::angle: {
            double phi = deg2rad(rng.uniform(30, 150));
            double l1 = rng.uniform(0.7, 1.4), l2 = rng.uniform(0.7, 1.4);
            return {{l1, 0}, {0, 0}, dir(phi) * l2};
        }
        case PK::triangle: {
            double base = rng.uniform(0.9, 1.5);
            double alpha = deg2rad(rng.uniform(35, 80));
            double beta = deg2rad(rng.uniform(35, 80));
            Vec2 a{0, 0}, b{base, 0};
            Vec2 c = line_intersect(a, dir(alpha), b, dir(kPi - beta), 0);
            return {a, b, c};
        }
        case PK::iso_triangle: {
            double s = rng.uniform(0.8, 1.3);
            double apex = deg2rad(rng.uniform(30, 110));
            return {{0, 0}, dir(-kPi / 2 - apex / 2) * s, dir(-kPi / 2 + apex / 2) * s};
        }
        case PK::r_triangle:
            return {{0, 0}, {rng.uniform(0.7, 1.4), 0}, {0, rng.uniform(0.7, 1.4)}};
        case PK::triangle_ab: {
            double s = rng.uniform(0.5, 0.9);
            double phi = deg2rad(rng.uniform(35, 120));
            return {{0, 0}, {s, 0}, dir(phi) * (2.0 * s)};
        }
        case PK::ieq_triangle: {
            double s = rng.uniform(0.8, 1.4);
            return {{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}};
        }
        case PK::risos: {
            double s = rng.uniform(0.7, 1.3);
            return {{0, 0}, {s, 0}, {0, s}};
        }
        case PK::rectangle: {
            double w = rng.uniform(0.9, 1.6), h = rng.uniform(0.5, 1.1);
            return {{0, 0}, {w, 0}, {w, h}, {0, h}};
        }
        case PK::isquare: {
            double s = rng.uniform(0.7, 1.3);
            return {{0, 0}, {s, 0}, {s, s}, {0, s}};
        }
        case PK::trapezoid: {
            double w1 = rng.uniform(1.0, 1.5);
            double w2 = rng.uniform(0.5, 0.85) * w1;
            double off = rng.uniform(0.05, 0.35) * w1;
            double h = rng.uniform(0.5, 0.9);
            return {{0, 0}, {w1, 0}, {off + w2, h}, {off, h}};
        }
        case PK::r_trapezoid: {
            double w1 = rng.uniform(1.0, 1.5);
            double w2 = rng.uniform(0.55, 0.85) * w1;
            double h = rng.uniform(0.5, 1.0);
            return {{0, 0}, {w1, 0}, {w2, h}, {0, h}};
        }
        case PK::eq_trapezoid: {
            double w = rng.uniform(1.0, 1.5);
            double inset = rng.uniform(0.12, 0.3) * w;
            double h = rng.uniform(0.45, 0.95);
            return {{0, 0}, {w, 0}, {w - inset, h}, {inset, h}};
        }
        case PK::quadrangle:
        case PK::pentagon: {
            int n = kind == PK::quadrangle ? 4 : 5;
            double glo = n == 4 ? 50 : 45, ghi = n == 4 ? 120 : 100;
            std::vector<double> gaps(n);
            double total = 0;
            for (auto& g : gaps) total += (g = rng.uniform(glo, ghi));
            double psi = rng.uniform(0, 2 * kPi);
            std::vector<Vec2> pts;
            double acc = 0;
            for (int i = 0; i < n; ++i) {
                double r = rng.uniform(n == 4 ? 0.6 : 0.7, 1.1);
                pts.push_back(dir(psi + acc * 2 * kPi / total) * r);
                acc += gaps[i];
            }
            return pts;
        }
        case PK::eq_quadrangle: {
            double s = rng.uniform(0.7, 1.2);
            double phi = deg2rad(rng.uniform(40, 140));
            Vec2 e = dir(phi) * s;
            return {{0, 0}, {s, 0}, Vec2{s, 0} + e, e};
        }
        case PK::eqdia_quadrangle: {
            double d = rng.uniform(1.1, 1.6);
            double phi = deg2rad(rng.uniform(50, 130));
            double psi = rng.uniform(0, 2 * kPi);
            Vec2 u = dir(psi), v = dir(psi + phi);
            double s1 = rng.uniform(0.35, 0.65) * d;
            double s2 = rng.uniform(0.35, 0.65) * d;
            return {u * -s1, v * -s2, u * (d - s1), v * (d - s2)};
        }
        case PK::eq_pentagon: {
            double r = rng.uniform(0.8, 1.2);
            double psi = rng.uniform(0, 2 * kPi);
            std::vector<Vec2> pts;
            for (int i = 0; i < 5; ++i) pts.push_back(dir(psi + i * 2 * kPi / 5) * r);
            return pts;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Parametric sampling
// ---------------------------------------------------------------------------

// Direct sample of a parametric relation's new point; returns nullopt for
// the relations that only the generic solver handles.
std::optional<Vec2> sample_parametric(RelationKind kind,
                                      const std::vector<Vec2>& in,
                                      double literal_deg, int stmt, Rng& rng) {
    using RK = RelationKind;
    switch (kind) {
        case RK::angle_bisector: {
            Vec2 a = in[0], b = in[1], c = in[2];
            Vec2 m = unit(a - b) + unit(c - b);
            if (norm(m) < 1e-9) inconsistent(stmt, "bisector of a straight angle");
            double l0 = 0.5 * (dist(a, b) + dist(c, b));
            return b + unit(m) * (l0 * rng.uniform(0.35, 1.2));
        }
        case RK::angle_mirror: {
            Vec2 a = in[0], b = in[1], c = in[2];
            Vec2 u = unit(a - b), w = unit(c - b);
            if (dist(a, b) < 1e-24 || dist(c, b) < 1e-24) {
                inconsistent(stmt, "zero-length ray");
            }
            Vec2 refl = w * (2.0 * dot(u, w)) - u;
            double l0 = 0.5 * (dist(a, b) + dist(c, b));
            return b + refl * (l0 * rng.uniform(0.35, 1.2));
        }
        case RK::eqdistance: {
            double r = dist(in[1], in[2]);
            if (r < 1e-24) inconsistent(stmt, "zero reference distance");
            return in[0] + dir(rng.uniform(0, 2 * kPi)) * r;
        }
        case RK::on_bline: {
            Vec2 a = in[0], b = in[1];
            if (dist(a, b) < 1e-24) inconsistent(stmt, "coincident endpoints");
            Vec2 m = (a + b) / 2.0;
            return m + perp(unit(b - a)) *
                           (rng.pick_sign() * rng.uniform(0.3, 1.0) * dist(a, b));
        }
        case RK::on_line:
            return in[0] + (in[1] - in[0]) * rng.uniform(-0.4, 1.4);
        case RK::on_opline:
            return in[0] - (in[1] - in[0]) * rng.uniform(0.25, 1.1);
        case RK::on_pline: {
            Vec2 d = in[2] - in[1];
            if (norm(d) < 1e-24) inconsistent(stmt, "zero direction");
            return in[0] + d * (rng.pick_sign() * rng.uniform(0.35, 1.2));
        }
        case RK::on_tline: {
            Vec2 d = in[2] - in[1];
            if (norm(d) < 1e-24) inconsistent(stmt, "zero direction");
            return in[0] + perp(d) * (rng.pick_sign() * rng.uniform(0.35, 1.2));
        }
        case RK::on_circle: {
            double r = dist(in[0], in[1]);
            if (r < 1e-24) inconsistent(stmt, "zero-radius circle");
            return in[0] + dir(rng.uniform(0, 2 * kPi)) * r;
        }
        case RK::on_dia: {
            Vec2 m = (in[0] + in[1]) / 2.0;
            double r = dist(in[0], in[1]) / 2.0;
            if (r < 1e-24) inconsistent(stmt, "zero-diameter circle");
            return m + dir(rng.uniform(0, 2 * kPi)) * r;
        }
        case RK::lc_tangent: {
            Vec2 a = in[0], o = in[1];
            if (dist(a, o) < 1e-24) inconsistent(stmt, "tangent point is the center");
            return a + perp(unit(a - o)) *
                           (rng.pick_sign() * rng.uniform(0.3, 1.0) * dist(a, o));
        }
        case RK::s_angle: {
            Vec2 a = in[0], b = in[1];
            if (dist(a, b) < 1e-24) inconsistent(stmt, "zero-length ray");
            Vec2 d = rotate(unit(a - b), deg2rad(literal_deg));
            return b + d * (rng.uniform(0.4, 1.3) * dist(a, b));
        }
        case RK::on_aline: {
            Vec2 a = in[0], b = in[1], c = in[2], d = in[3], e = in[4];
            double phi = wrap_angle(angle_of(c - d) - angle_of(e - d));
            return a + dir(angle_of(b - a) + phi) *
                           (rng.uniform(0.35, 1.2) * dist(a, b));
        }
        case RK::on_circum: {
            Vec2 cc = closed_form_points(RelationKind::circumcenter, in)[0];
            return cc + dir(rng.uniform(0, 2 * kPi)) * dist(cc, in[0]);
        }
        default:
            return std::nullopt;  // eqangle2, eqangle3: generic solver
    }
}

// ---------------------------------------------------------------------------
// Damped least squares (Levenberg-Marquardt on stacked residuals)
// ---------------------------------------------------------------------------

bool gauss_solve(std::vector<std::vector<double>>& m, std::vector<double>& rhs) {
    const size_t n = rhs.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (std::abs(m[pivot][col]) < 1e-30) return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (size_t i = 0; i < n; ++i) rhs[i] /= m[i][i];
    return true;
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct SolveResult {
    std::vector<Vec2> news;
    bool converged = false;
};

template <typename ResidualFn>
SolveResult damped_least_squares(const ResidualFn& fn, std::vector<Vec2> news,
                                 double tau, int max_iter, double scale) {
    const size_t n = news.size() * 2;
    auto unknowns = [&]() {
        std::vector<double> u;
        for (auto p : news) {
            u.push_back(p.x);
            u.push_back(p.y);
        }
        return u;
    }();
    auto to_points = [&](const std::vector<double>& u) {
        std::vector<Vec2> pts;
        for (size_t i = 0; i < u.size(); i += 2) pts.push_back({u[i], u[i + 1]});
        return pts;
    };

    std::vector<double> r = fn(to_points(unknowns));
    if (r.empty()) return {news, true};
    double cost = 0;
    for (double v : r) cost += v * v;
    double lambda = 1e-3;

    for (int iter = 0; iter < max_iter; ++iter) {
        if (max_abs(r) <= tau) return {to_points(unknowns), true};

        // Forward-difference Jacobian.
        const size_t m = r.size();
        std::vector<std::vector<double>> jac(m, std::vector<double>(n));
        for (size_t j = 0; j < n; ++j) {
            double h = 1e-7 * std::max(scale, std::abs(unknowns[j]));
            auto bumped = unknowns;
            bumped[j] += h;
            std::vector<double> rj = fn(to_points(bumped));
            for (size_t i = 0; i < m; ++i) jac[i][j] = (rj[i] - r[i]) / h;
        }

        // Normal equations with LM damping.
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        std::vector<double> g(n, 0.0);
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < n; ++j) {
                g[j] -= jac[i][j] * r[i];
                for (size_t k = j; k < n; ++k) a[j][k] += jac[i][j] * jac[i][k];
            }
        }
        for (size_t j = 0; j < n; ++j) {
            for (size_t k = 0; k < j; ++k) a[j][k] = a[k][j];
        }

        bool stepped = false;
        for (int tries = 0; tries < 24 && !stepped; ++tries) {
            auto damped = a;
            for (size_t j = 0; j < n; ++j) {
                damped[j][j] += lambda * (a[j][j] + 1e-12);
            }
            auto step = g;
            if (!gauss_solve(damped, step)) {
                lambda *= 10;
                continue;
            }
            auto candidate = unknowns;
            for (size_t j = 0; j < n; ++j) candidate[j] += step[j];
            std::vector<double> rc = fn(to_points(candidate));
            double cc = 0;
            for (double v : rc) cc += v * v;
            if (cc < cost) {
                unknowns = candidate;
                r = rc;
                cost = cc;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
            } else {
                lambda *= 10;
                if (lambda > 1e14) break;
            }
        }
        if (!stepped) break;
    }
    return {to_points(unknowns), max_abs(r) <= tau};
}

// Initial guess for forced-generic / solver-only relations. Branch-sensitive
// constructions start on the side the closed form would pick so the solver
// refines into the right basin.
std::vector<Vec2> generic_init(RelationKind kind, const std::vector<Vec2>& in,
                               int new_points, double scale, Rng& rng) {
    using RK = RelationKind;
    auto jitter = [&]() {
        return Vec2{rng.uniform(-0.05, 0.05) * scale, rng.uniform(-0.05, 0.05) * scale};
    };
    switch (kind) {
        case RK::eq_triangle: {
            Vec2 m = (in[0] + in[1]) / 2.0;
            return {m + perp(in[1] - in[0]) * 0.7 + jitter()};
        }
        case RK::nsquare:
            return {in[0] + rotate(in[1] - in[0], -kPi / 2.0) * 0.8 + jitter()};
        case RK::psquare:
            return {in[0] + rotate(in[1] - in[0], kPi / 2.0) * 0.8 + jitter()};
        case RK::intersection_cc: {
            Vec2 f = foot_point(in[2], in[0], in[1], -1);
            return {f * 2.0 - in[2] + jitter()};
        }
        case RK::intersection_lc: {
            Vec2 f = foot_point(in[1], in[0], in[2], -1);
            return {f * 2.0 - in[2] + jitter()};
        }
        case RK::reflect: {
            Vec2 f = foot_point(in[0], in[1], in[2], -1);
            return {f * 2.0 - in[0] + jitter()};
        }
        case RK::square: {
            Vec2 up = perp(in[1] - in[0]);
            return {in[1] + up * 0.8 + jitter(), in[0] + up * 0.8 + jitter()};
        }
        case RK::trisegment:
            return {in[0] + (in[1] - in[0]) * 0.3 + jitter(),
                    in[0] + (in[1] - in[0]) * 0.7 + jitter()};
        case RK::trisect:
            return {in[0] + (in[2] - in[0]) * 0.33 + jitter(),
                    in[0] + (in[2] - in[0]) * 0.67 + jitter()};
        case RK::tangent: {
            Vec2 u = unit(in[0] - in[1]);
            double r = dist(in[1], in[2]);
            return {in[1] + rotate(u, 0.8) * r + jitter(),
                    in[1] + rotate(u, -0.8) * r + jitter()};
        }
        default: {
            Vec2 centroid{0, 0};
            for (auto p : in) centroid = centroid + p;
            centroid = centroid / static_cast<double>(in.size());
            std::vector<Vec2> init;
            for (int i = 0; i < new_points; ++i) {
                init.push_back(centroid + jitter() +
                               Vec2{rng.uniform(-0.4, 0.4) * scale,
                                    rng.uniform(-0.4, 0.4) * scale});
            }
            return init;
        }
    }
}

// ---------------------------------------------------------------------------
// Derived elements
// ---------------------------------------------------------------------------

std::string seg_id(const std::string& a, const std::string& b) {
    return a < b ? "seg-" + a + "-" + b : "seg-" + b + "-" + a;
}

struct ElementBuilder {
    const FigureRealization& fig;
    int stmt;
    std::vector<DrawableElement>& out;
    std::unordered_set<std::string>& seen;

    Vec2 at(const std::string& name) const { return fig.coord(name); }

    void add(DrawableElement e) {
        if (seen.insert(e.id).second) out.push_back(std::move(e));
    }

    void seg(const std::string& a, const std::string& b) {
        add({ElementKind::segment, stmt, seg_id(a, b), {at(a), at(b)}, 0.0});
    }

    void line(const std::vector<std::string>& names) {
        std::string id = "line";
        std::vector<Vec2> anchors;
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& n : sorted) id += "-" + n;
        for (const auto& n : names) anchors.push_back(at(n));
        add({ElementKind::line_through, stmt, id, anchors, 0.0});
    }

    void circle(const std::string& id, Vec2 center, double radius) {
        add({ElementKind::circle, stmt, id, {center}, radius});
    }

    void angle_mark(const std::string& v, const std::string& r1,
                    const std::string& r2) {
        add({ElementKind::angle_mark, stmt, "ang-" + v + "-" + r1 + "-" + r2,
             {at(v), at(r1), at(r2)}, 0.0});
    }

    void right_angle_mark(const std::string& v, const std::string& r1,
                          const std::string& r2) {
        add({ElementKind::right_angle_mark, stmt, "ra-" + v + "-" + r1 + "-" + r2,
             {at(v), at(r1), at(r2)}, 0.0});
    }
};

void derive_elements(const Statement& st, int stmt, FigureRealization& fig,
                     std::unordered_set<std::string>& seen) {
    ElementBuilder eb{fig, stmt, fig.derived, seen};
    if (st.primitive) {
        const auto& names = st.introduced;
        if (*st.primitive == PrimitiveKind::segment) {
            eb.seg(names[0], names[1]);
        } else if (*st.primitive == PrimitiveKind::angle) {
            eb.seg(names[1], names[0]);
            eb.seg(names[1], names[2]);
            eb.angle_mark(names[1], names[0], names[2]);
        } else {
            for (size_t i = 0; i < names.size(); ++i) {
                eb.seg(names[i], names[(i + 1) % names.size()]);
            }
        }
        return;
    }

    using RK = RelationKind;
    const auto& in = st.args;
    const auto& nw = st.introduced;
    switch (*st.relation) {
        case RK::angle_bisector:
            eb.seg(in[1], in[0]);
            eb.seg(in[1], in[2]);
            eb.seg(in[1], nw[0]);
            eb.angle_mark(in[1], in[0], nw[0]);
            eb.angle_mark(in[1], nw[0], in[2]);
            break;
        case RK::angle_mirror:
            eb.seg(in[1], in[0]);
            eb.seg(in[1], in[2]);
            eb.seg(in[1], nw[0]);
            break;
        case RK::circle:
        case RK::circumcenter:
            eb.circle("circ-" + nw[0] + "-" + in[0], eb.at(nw[0]),
                      dist(eb.at(nw[0]), eb.at(in[0])));
            break;
        case RK::eq_triangle:
            eb.seg(nw[0], in[0]);
            eb.seg(nw[0], in[1]);
            eb.seg(in[0], in[1]);
            break;
        case RK::eqangle2:
            eb.seg(in[0], in[1]);
            eb.seg(in[0], nw[0]);
            eb.seg(in[2], nw[0]);
            eb.seg(in[2], in[1]);
            break;
        case RK::eqdistance:
            eb.seg(nw[0], in[0]);
            break;
        case RK::foot:
            eb.line({in[1], in[2], nw[0]});
            eb.seg(in[0], nw[0]);
            eb.right_angle_mark(nw[0], in[0], in[1]);
            break;
        case RK::incenter:
            eb.circle("incirc-" + nw[0], eb.at(nw[0]),
                      point_line_dist(eb.at(nw[0]), eb.at(in[0]), eb.at(in[1])));
            break;
        case RK::excenter:
            eb.circle("excirc-" + nw[0], eb.at(nw[0]),
                      point_line_dist(eb.at(nw[0]), eb.at(in[1]), eb.at(in[2])));
            break;
        case RK::intersection_cc:
            eb.circle("circ-" + in[0] + "-" + in[2], eb.at(in[0]),
                      dist(eb.at(in[0]), eb.at(in[2])));
            eb.circle("circ-" + in[1] + "-" + in[2], eb.at(in[1]),
                      dist(eb.at(in[1]), eb.at(in[2])));
            break;
        case RK::on_bline:
            eb.seg(in[0], in[1]);
            eb.seg(nw[0], in[0]);
            eb.seg(nw[0], in[1]);
            break;
        case RK::intersection_lc:
            eb.line({in[0], in[2], nw[0]});
            eb.circle("circ-" + in[1] + "-" + in[2], eb.at(in[1]),
                      dist(eb.at(in[1]), eb.at(in[2])));
            break;
        case RK::on_aline:
            eb.seg(in[0], in[1]);
            eb.seg(in[0], nw[0]);
            eb.seg(in[3], in[2]);
            eb.seg(in[3], in[4]);
            break;
        case RK::intersection_ll:
            eb.line({in[0], in[1], nw[0]});
            eb.line({in[2], in[3], nw[0]});
            break;
        case RK::on_line:
            eb.line({in[0], in[1], nw[0]});
            break;
        case RK::intersection_lp:
            eb.line({in[0], in[1], nw[0]});
            eb.seg(in[3], in[4]);
            eb.line({in[2], nw[0]});
            break;
        case RK::intersection_lt:
            eb.line({in[0], in[1], nw[0]});
            eb.seg(in[3], in[4]);
            eb.line({in[2], nw[0]});
            break;
        case RK::intersection_pp:
            eb.seg(in[1], in[2]);
            eb.line({in[0], nw[0]});
            eb.seg(in[4], in[5]);
            eb.line({in[3], nw[0]});
            break;
        case RK::intersection_tt:
            eb.seg(in[1], in[2]);
            eb.line({in[0], nw[0]});
            eb.seg(in[4], in[5]);
            eb.line({in[3], nw[0]});
            break;
        case RK::lc_tangent:
            eb.circle("circ-" + in[1] + "-" + in[0], eb.at(in[1]),
                      dist(eb.at(in[1]), eb.at(in[0])));
            eb.line({in[0], nw[0]});
            eb.seg(in[1], in[0]);
            eb.right_angle_mark(in[0], nw[0], in[1]);
            break;
        case RK::midpoint:
            eb.seg(in[0], in[1]);
            break;
        case RK::mirror:
            eb.line({in[0], in[1], nw[0]});
            break;
        case RK::nsquare:
        case RK::psquare:
            eb.seg(in[0], nw[0]);
            eb.seg(in[0], in[1]);
            eb.right_angle_mark(in[0], nw[0], in[1]);
            break;
        case RK::on_circle:
            eb.circle("circ-" + in[0] + "-" + in[1], eb.at(in[0]),
                      dist(eb.at(in[0]), eb.at(in[1])));
            break;
        case RK::on_pline:
            eb.line({in[0], nw[0]});
            eb.seg(in[1], in[2]);
            break;
        case RK::on_tline:
            eb.line({in[0], nw[0]});
            eb.seg(in[1], in[2]);
            break;
        case RK::on_dia: {
            Vec2 m = (eb.at(in[0]) + eb.at(in[1])) / 2.0;
            eb.circle("circdia-" + in[0] + "-" + in[1], m,
                      dist(eb.at(in[0]), eb.at(in[1])) / 2.0);
            eb.seg(nw[0], in[0]);
            eb.seg(nw[0], in[1]);
            eb.right_angle_mark(nw[0], in[0], in[1]);
            break;
        }
        case RK::orthocenter:
            eb.seg(in[0], in[1]);
            eb.seg(in[1], in[2]);
            eb.seg(in[2], in[0]);
            break;
        case RK::parallelogram:
            eb.seg(in[0], in[1]);
            eb.seg(in[1], in[2]);
            eb.seg(in[2], nw[0]);
            eb.seg(nw[0], in[0]);
            break;
        case RK::reflect:
            eb.line({in[1], in[2]});
            eb.seg(in[0], nw[0]);
            break;
        case RK::s_angle:
            eb.seg(in[1], in[0]);
            eb.seg(in[1], nw[0]);
            eb.angle_mark(in[1], in[0], nw[0]);
            break;
        case RK::shift:
            eb.seg(in[2], in[1]);
            eb.seg(in[0], nw[0]);
            break;
        case RK::on_opline:
            eb.line({nw[0], in[0], in[1]});
            break;
        case RK::eqangle3:
            eb.seg(nw[0], in[0]);
            eb.seg(nw[0], in[1]);
            eb.seg(in[2], in[3]);
            eb.seg(in[2], in[4]);
            break;
        case RK::on_circum: {
            Vec2 cc = closed_form_points(RelationKind::circumcenter,
                                         {eb.at(in[0]), eb.at(in[1]), eb.at(in[2])})[0];
            eb.circle("circ-" + in[0] + in[1] + in[2], cc, dist(cc, eb.at(in[0])));
            break;
        }
        case RK::square:
            eb.seg(in[0], in[1]);
            eb.seg(in[1], nw[0]);
            eb.seg(nw[0], nw[1]);
            eb.seg(nw[1], in[0]);
            eb.right_angle_mark(in[1], in[0], nw[0]);
            break;
        case RK::trisegment:
            eb.line({in[0], nw[0], nw[1], in[1]});
            break;
        case RK::trisect:
            eb.seg(in[1], in[0]);
            eb.seg(in[1], in[2]);
            eb.seg(in[1], nw[0]);
            eb.seg(in[1], nw[1]);
            eb.line({in[0], nw[0], nw[1], in[2]});
            eb.angle_mark(in[1], in[0], nw[0]);
            eb.angle_mark(in[1], nw[0], nw[1]);
            eb.angle_mark(in[1], nw[1], in[2]);
            break;
        case RK::tangent:
            eb.circle("circ-" + in[1] + "-" + in[2], eb.at(in[1]),
                      dist(eb.at(in[1]), eb.at(in[2])));
            eb.seg(in[0], nw[0]);
            eb.seg(in[0], nw[1]);
            eb.right_angle_mark(nw[0], in[0], in[1]);
            eb.right_angle_mark(nw[1], in[0], in[1]);
            break;
    }
}

// Local acceptability probe used by the per-statement resample loop.
bool probe_ok(const std::vector<Vec2>& news,
              const std::vector<RealizedPoint>& existing,
              const RealizeOptions& opt) {
    std::vector<RealizedPoint> all = existing;
    for (auto p : news) all.push_back({"", p, 0});
    double s = 1.8 / figure_scale(all);
    for (auto p : news) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
        if (std::abs(p.x) > opt.out_of_frame_limit ||
            std::abs(p.y) > opt.out_of_frame_limit) {
            return false;
        }
        for (const auto& e : existing) {
            if (dist(p, e.pos) * s < opt.delta_min) return false;
        }
    }
    for (size_t i = 0; i + 1 < news.size(); ++i) {
        for (size_t j = i + 1; j < news.size(); ++j) {
            if (dist(news[i], news[j]) * s < opt.delta_min) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<Vec2> generic_solve_points(RelationKind kind,
                                       const std::vector<Vec2>& inputs,
                                       double literal_deg, uint64_t seed,
                                       const RealizeOptions& opt) {
    double scale = 1.0;
    if (inputs.size() >= 2) {
        double xlo = inputs[0].x, xhi = inputs[0].x;
        double ylo = inputs[0].y, yhi = inputs[0].y;
        for (auto p : inputs) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
        scale = std::max({xhi - xlo, yhi - ylo, 1e-9});
    }
    auto residual_fn = [&](const std::vector<Vec2>& cand) {
        return relation_residuals(kind, inputs, cand, literal_deg, scale);
    };
    const int new_points = relation_info(kind).new_points;
    for (int attempt = 0; attempt <= opt.max_resamples; ++attempt) {
        Rng rng(hash_combine({seed, static_cast<uint64_t>(attempt)}));
        auto init = generic_init(kind, inputs, new_points, scale, rng);
        auto solved = damped_least_squares(residual_fn, init, opt.tau_solve,
                                           opt.max_iterations, scale);
        if (solved.converged) return solved.news;
    }
    throw RealizeError(RealizeError::Kind::solver_diverged, -1,
                       "generic solve failed for " +
                           std::string(relation_info(kind).name));
}

// ---------------------------------------------------------------------------
// realize
// ---------------------------------------------------------------------------

FigureRealization realize(const ConstructionProgram& program, uint64_t seed,
                          const RealizeOptions& opt) {
    FigureRealization fig;
    std::unordered_set<std::string> seen_elements;

    for (size_t k = 0; k < program.statements.size(); ++k) {
        const Statement& st = program.statements[k];
        const int stmt = static_cast<int>(k);
        std::vector<Vec2> news;

        if (st.primitive) {
            for (int attempt = 0;; ++attempt) {
                if (attempt > opt.max_resamples) {
                    throw RealizeError(RealizeError::Kind::solver_diverged, stmt,
                                       "no acceptable base placement");
                }
                Rng rng(hash_combine({seed, k, static_cast<uint64_t>(attempt)}));
                news = sample_primitive(*st.primitive, rng);
                if (probe_ok(news, fig.points, opt)) break;
            }
        } else {
            const auto& info = relation_info(*st.relation);
            std::vector<Vec2> in;
            in.reserve(st.args.size());
            for (const auto& a : st.args) in.push_back(fig.coord(a));
            double literal = st.literal.value_or(0.0);
            double scale = figure_scale(fig.points);

            auto residual_fn = [&](const std::vector<Vec2>& cand) {
                return relation_residuals(*st.relation, in, cand, literal, scale);
            };

            if (info.realization_class == RealizationClass::deterministic &&
                !opt.force_generic_solver) {
                news = closed_form_points(*st.relation, in);
                for (auto p : news) {
                    if (!std::isfinite(p.x) || !std::isfinite(p.y) ||
                        std::abs(p.x) > opt.out_of_frame_limit ||
                        std::abs(p.y) > opt.out_of_frame_limit) {
                        throw RealizeError(RealizeError::Kind::inconsistent_constraints,
                                           stmt, "construction escapes the frame");
                    }
                }
            } else {
                const bool parametric =
                    info.realization_class == RealizationClass::parametric;
                bool done = false;
                for (int attempt = 0; attempt <= opt.max_resamples && !done;
                     ++attempt) {
                    Rng rng(hash_combine({seed, k, static_cast<uint64_t>(attempt)}));
                    std::optional<Vec2> direct;
                    if (parametric) {
                        direct = sample_parametric(*st.relation, in, literal, stmt, rng);
                    }
                    if (direct) {
                        news = {*direct};
                    } else {
                        auto init = generic_init(*st.relation, in, info.new_points,
                                                 scale, rng);
                        auto solved = damped_least_squares(
                            residual_fn, init, opt.tau_solve, opt.max_iterations,
                            scale);
                        if (!solved.converged) continue;
                        news = solved.news;
                    }
                    // Deterministic constructions keep whatever position the
                    // solver converged to; only sampled ones are retried on
                    // local degeneracy.
                    done = !parametric || probe_ok(news, fig.points, opt);
                }
                if (!done) {
                    throw RealizeError(RealizeError::Kind::solver_diverged, stmt,
                                       "no acceptable placement for " +
                                           std::string(info.name));
                }
            }
        }

        for (size_t i = 0; i < st.introduced.size(); ++i) {
            fig.points.push_back({st.introduced[i], news[i], stmt});
        }
        derive_elements(st, stmt, fig, seen_elements);
    }

    // Residual audit over the whole figure.
    double L = figure_scale(fig.points);
    double worst = 0.0;
    for (size_t k = 0; k < program.statements.size(); ++k) {
        const Statement& st = program.statements[k];
        std::vector<double> res;
        if (st.primitive) {
            std::vector<Vec2> pts;
            for (const auto& n : st.introduced) pts.push_back(fig.coord(n));
            res = primitive_residuals(*st.primitive, pts, L);
        } else {
            std::vector<Vec2> in, nw;
            for (const auto& a : st.args) in.push_back(fig.coord(a));
            for (const auto& n : st.introduced) nw.push_back(fig.coord(n));
            res = relation_residuals(*st.relation, in, nw,
                                     st.literal.value_or(0.0), L);
        }
        worst = std::max(worst, max_abs(res));
    }
    if (worst > opt.tau_solve) {
        throw RealizeError(RealizeError::Kind::solver_diverged, -1,
                           "figure residual above tolerance");
    }
    fig.residual = worst;
    return fig;
}

// ---------------------------------------------------------------------------
// normalize_frame
// ---------------------------------------------------------------------------

FigureRealization normalize_frame(const FigureRealization& fig) {
    if (fig.points.size() < 2) {
        throw RealizeError(RealizeError::Kind::degenerate_extent, -1,
                           "need at least two points");
    }
    double xlo = fig.points[0].pos.x, xhi = xlo;
    double ylo = fig.points[0].pos.y, yhi = ylo;
    for (const auto& p : fig.points) {
        xlo = std::min(xlo, p.pos.x);
        xhi = std::max(xhi, p.pos.x);
        ylo = std::min(ylo, p.pos.y);
        yhi = std::max(yhi, p.pos.y);
    }
    double extent = std::max(xhi - xlo, yhi - ylo);
    if (extent < 1e-12) {
        throw RealizeError(RealizeError::Kind::degenerate_extent, -1,
                           "all points coincide");
    }
    double s = 1.8 / extent;
    Vec2 center{(xlo + xhi) / 2.0, (ylo + yhi) / 2.0};
    if (std::abs(s - 1.0) < 1e-15 && std::abs(center.x) < 1e-15 &&
        std::abs(center.y) < 1e-15) {
        return fig;  // exact idempotence
    }

    FigureRealization out = fig;
    for (auto& p : out.points) p.pos = (p.pos - center) * s;
    for (auto& e : out.derived) {
        for (auto& a : e.anchors) a = (a - center) * s;
        e.radius *= s;
    }
    out.residual = fig.residual;  // scale-normalized already
    return out;
}

// ---------------------------------------------------------------------------
// check_degeneracy
// ---------------------------------------------------------------------------

std::string_view to_string(DegeneracyReason r) {
    switch (r) {
        case DegeneracyReason::points_too_close: return "PointsTooClose";
        case DegeneracyReason::near_collinear: return "NearCollinear";
        case DegeneracyReason::angle_too_small: return "AngleTooSmall";
        case DegeneracyReason::radius_out_of_range: return "RadiusOutOfRange";
        case DegeneracyReason::solver_diverged: return "SolverDiverged";
        case DegeneracyReason::out_of_frame: return "OutOfFrame";
    }
    return "?";
}

namespace {

double triple_min_angle(Vec2 a, Vec2 b, Vec2 c) {
    return std::min({angle_at(a, b, c), angle_at(b, a, c), angle_at(c, a, b)});
}

}  // namespace

DegeneracyReport check_degeneracy(const FigureRealization& fig,
                                  const ConstructionProgram& program,
                                  const RealizeOptions& opt) {
    DegeneracyReport report;
    const double theta_min = deg2rad(opt.theta_min_deg);

    for (const auto& p : fig.points) {
        if (!std::isfinite(p.pos.x) || !std::isfinite(p.pos.y) ||
            std::abs(p.pos.x) > opt.out_of_frame_limit ||
            std::abs(p.pos.y) > opt.out_of_frame_limit) {
            report.reasons.push_back({DegeneracyReason::out_of_frame,
                                      p.statement_index,
                                      {p.name},
                                      "coordinate escapes the frame"});
        }
    }
    if (!report.reasons.empty()) return report;

    FigureRealization norm_fig;
    try {
        norm_fig = normalize_frame(fig);
    } catch (const RealizeError&) {
        std::vector<std::string> names;
        for (const auto& p : fig.points) names.push_back(p.name);
        report.reasons.push_back({DegeneracyReason::points_too_close, -1, names,
                                  "figure has no extent"});
        return report;
    }

    for (size_t i = 0; i + 1 < norm_fig.points.size(); ++i) {
        for (size_t j = i + 1; j < norm_fig.points.size(); ++j) {
            double d = dist(norm_fig.points[i].pos, norm_fig.points[j].pos);
            if (d < opt.delta_min) {
                report.reasons.push_back(
                    {DegeneracyReason::points_too_close,
                     std::max(norm_fig.points[i].statement_index,
                              norm_fig.points[j].statement_index),
                     {norm_fig.points[i].name, norm_fig.points[j].name},
                     "distance " + std::to_string(d)});
            }
        }
    }

    for (const auto& e : norm_fig.derived) {
        if (e.kind != ElementKind::circle) continue;
        if (e.radius < opt.radius_min || e.radius > opt.radius_max) {
            report.reasons.push_back({DegeneracyReason::radius_out_of_range,
                                      e.statement_index,
                                      {},
                                      e.id + " radius " + std::to_string(e.radius)});
        }
    }

    auto pos = [&](const std::string& n) { return norm_fig.coord(n); };
    auto flag_small_angle = [&](int stmt, std::vector<std::string> names,
                                double angle) {
        report.reasons.push_back({DegeneracyReason::angle_too_small, stmt,
                                  std::move(names),
                                  "angle " + std::to_string(angle * 180.0 / kPi) +
                                      " deg"});
    };
    auto flag_collinear = [&](int stmt, std::vector<std::string> names) {
        report.reasons.push_back({DegeneracyReason::near_collinear, stmt,
                                  std::move(names), "inputs nearly collinear"});
    };
    auto check_triple_collinear = [&](int stmt, const std::string& a,
                                      const std::string& b, const std::string& c) {
        if (dist(pos(a), pos(b)) < 1e-12 || dist(pos(b), pos(c)) < 1e-12 ||
            dist(pos(a), pos(c)) < 1e-12) {
            return;  // proximity findings already cover this
        }
        if (triple_min_angle(pos(a), pos(b), pos(c)) < theta_min) {
            flag_collinear(stmt, {a, b, c});
        }
    };
    auto line_angle = [&](Vec2 d1, Vec2 d2) {
        double a = std::abs(wrap_angle(angle_of(d1) - angle_of(d2)));
        return std::min(a, kPi - a);
    };

    for (size_t k = 0; k < program.statements.size(); ++k) {
        const Statement& st = program.statements[k];
        const int stmt = static_cast<int>(k);
        if (st.primitive) {
            const auto& names = st.introduced;
            if (*st.primitive == PrimitiveKind::segment) continue;
            if (*st.primitive == PrimitiveKind::angle) {
                double a = angle_at(pos(names[1]), pos(names[0]), pos(names[2]));
                if (a < theta_min || a > kPi - theta_min) {
                    flag_small_angle(stmt, names, a);
                }
                continue;
            }
            const size_t n = names.size();
            for (size_t i = 0; i < n; ++i) {
                Vec2 prev = pos(names[(i + n - 1) % n]);
                Vec2 here = pos(names[i]);
                Vec2 next = pos(names[(i + 1) % n]);
                double a = angle_at(here, prev, next);
                if (a < theta_min) flag_small_angle(stmt, {names[i]}, a);
            }
            continue;
        }

        using RK = RelationKind;
        const auto& in = st.args;
        switch (*st.relation) {
            case RK::circle:
            case RK::circumcenter:
            case RK::incenter:
            case RK::excenter:
            case RK::orthocenter:
            case RK::on_circum:
                check_triple_collinear(stmt, in[0], in[1], in[2]);
                break;
            case RK::trisect:
            case RK::angle_bisector:
            case RK::angle_mirror: {
                check_triple_collinear(stmt, in[0], in[1], in[2]);
                double a = angle_at(pos(in[1]), pos(in[0]), pos(in[2]));
                if (a < theta_min || a > kPi - theta_min) {
                    flag_small_angle(stmt, {in[0], in[1], in[2]}, a);
                }
                break;
            }
            case RK::eqangle3:
                check_triple_collinear(stmt, in[2], in[3], in[4]);
                break;
            case RK::intersection_ll: {
                double a = line_angle(pos(in[1]) - pos(in[0]),
                                      pos(in[3]) - pos(in[2]));
                if (a < theta_min) {
                    flag_small_angle(stmt, {in[0], in[1], in[2], in[3]}, a);
                }
                break;
            }
            case RK::intersection_lp: {
                double a = line_angle(pos(in[1]) - pos(in[0]),
                                      pos(in[4]) - pos(in[3]));
                if (a < theta_min) flag_small_angle(stmt, in, a);
                break;
            }
            case RK::intersection_lt: {
                double a = line_angle(pos(in[1]) - pos(in[0]),
                                      perp(pos(in[4]) - pos(in[3])));
                if (a < theta_min) flag_small_angle(stmt, in, a);
                break;
            }
            case RK::intersection_pp: {
                double a = line_angle(pos(in[2]) - pos(in[1]),
                                      pos(in[5]) - pos(in[4]));
                if (a < theta_min) flag_small_angle(stmt, in, a);
                break;
            }
            case RK::intersection_tt: {
                double a = line_angle(perp(pos(in[2]) - pos(in[1])),
                                      perp(pos(in[5]) - pos(in[4])));
                if (a < theta_min) flag_small_angle(stmt, in, a);
                break;
            }
            case RK::s_angle: {
                double lit = st.literal.value_or(0.0);
                double folded = std::abs(wrap_angle(deg2rad(lit)));
                if (folded < theta_min || folded > kPi - theta_min) {
                    flag_small_angle(stmt, in, folded);
                }
                break;
            }
            default:
                break;
        }
    }
    return report;
}

std::string realization_to_json(const FigureRealization& fig) {
    nlohmann::json j;
    nlohmann::json pts = nlohmann::json::object();
    for (const auto& p : fig.points) {
        pts[p.name] = {p.pos.x, p.pos.y};
    }
    j["points"] = pts;
    j["residual"] = fig.residual;
    j["elements"] = fig.derived.size();
    return j.dump(2);
}

}  // namespace figkit
