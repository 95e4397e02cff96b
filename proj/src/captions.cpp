#include "figkit/captions.hpp"

namespace figkit {

namespace {

std::string up(const std::string& name) {
    std::string out;
    for (char c : name) {
        out += (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
    }
    return out;
}

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += up(n);
    return out;
}

std::string angle_text(double deg) {
    std::string s = format_literal(deg);
    return s;
}

std::string primitive_caption(PrimitiveKind kind,
                              const std::vector<std::string>& p) {
    using PK = PrimitiveKind;
    switch (kind) {
        case PK::segment: return "Segment " + join(p) + ".";
        case PK::angle: return "Angle " + join(p) + ".";
        case PK::triangle: return "Triangle " + join(p) + ".";
        case PK::iso_triangle:
            return "Isosceles triangle " + join(p) + " with " + up(p[0]) + up(p[1]) +
                   " equal to " + up(p[0]) + up(p[2]) + ".";
        case PK::r_triangle:
            return "Right triangle " + join(p) + " with the right angle at " +
                   up(p[0]) + ".";
        case PK::triangle_ab:
            return "Triangle " + join(p) + " with " + up(p[0]) + up(p[2]) +
                   " twice as long as " + up(p[0]) + up(p[1]) + ".";
        case PK::ieq_triangle: return "Equilateral triangle " + join(p) + ".";
        case PK::risos:
            return "Right isosceles triangle " + join(p) +
                   " with the right angle at " + up(p[0]) + ".";
        case PK::rectangle: return "Rectangle " + join(p) + ".";
        case PK::isquare: return "Square " + join(p) + ".";
        case PK::trapezoid:
            return "Trapezoid " + join(p) + " with " + up(p[0]) + up(p[1]) +
                   " parallel to " + up(p[3]) + up(p[2]) + ".";
        case PK::r_trapezoid:
            return "Right trapezoid " + join(p) + " with " + up(p[0]) + up(p[1]) +
                   " parallel to " + up(p[3]) + up(p[2]) + " and a right angle at " +
                   up(p[0]) + ".";
        case PK::eq_trapezoid:
            return "Isosceles trapezoid " + join(p) + " with " + up(p[0]) +
                   up(p[1]) + " parallel to " + up(p[3]) + up(p[2]) + ".";
        case PK::quadrangle: return "Quadrilateral " + join(p) + ".";
        case PK::eq_quadrangle: return "Rhombus " + join(p) + ".";
        case PK::eqdia_quadrangle:
            return "Quadrilateral " + join(p) + " with diagonals " + up(p[0]) +
                   up(p[2]) + " and " + up(p[1]) + up(p[3]) + " of equal length.";
        case PK::pentagon: return "Pentagon " + join(p) + ".";
        case PK::eq_pentagon: return "Equilateral pentagon " + join(p) + ".";
    }
    return "";
}

}  // namespace

std::string caption_for(const Statement& st) {
    if (st.primitive) return primitive_caption(*st.primitive, st.introduced);

    using RK = RelationKind;
    const auto& in = st.args;
    const auto& nw = st.introduced;
    auto X = up(nw[0]);
    switch (*st.relation) {
        case RK::angle_bisector:
            return X + " lies on the bisector of angle " + up(in[0]) + up(in[1]) +
                   up(in[2]) + ".";
        case RK::angle_mirror:
            return X + " lies on the reflection of ray " + up(in[1]) + up(in[0]) +
                   " across line " + up(in[1]) + up(in[2]) + ".";
        case RK::circle:
            return X + " is the center of the circle through " + up(in[0]) + ", " +
                   up(in[1]) + " and " + up(in[2]) + ".";
        case RK::circumcenter:
            return X + " is the circumcenter of triangle " + join(in) + ".";
        case RK::eq_triangle:
            return X + " forms an equilateral triangle with " + up(in[0]) + " and " +
                   up(in[1]) + ".";
        case RK::eqangle2:
            return X + " is placed so that angle " + up(in[1]) + up(in[0]) + X +
                   " equals angle " + X + up(in[2]) + up(in[1]) + ".";
        case RK::eqdistance:
            return X + " is placed at distance " + up(in[1]) + up(in[2]) +
                   " from " + up(in[0]) + ".";
        case RK::foot:
            return X + " is the foot of the perpendicular from " + up(in[0]) +
                   " to line " + up(in[1]) + up(in[2]) + ".";
        case RK::incenter:
            return X + " is the incenter of triangle " + join(in) + ".";
        case RK::excenter:
            return X + " is the excenter of triangle " + join(in) + " opposite " +
                   up(in[0]) + ".";
        case RK::intersection_cc:
            return X + " is the second intersection of the circle centered at " +
                   up(in[0]) + " through " + up(in[2]) +
                   " and the circle centered at " + up(in[1]) + " through " +
                   up(in[2]) + ".";
        case RK::on_bline:
            return X + " lies on the perpendicular bisector of segment " +
                   up(in[0]) + up(in[1]) + ".";
        case RK::intersection_lc:
            return X + " is the second intersection of line " + up(in[0]) +
                   up(in[2]) + " with the circle centered at " + up(in[1]) +
                   " through " + up(in[2]) + ".";
        case RK::on_aline:
            return X + " is placed so that angle " + X + up(in[0]) + up(in[1]) +
                   " equals angle " + up(in[2]) + up(in[3]) + up(in[4]) + ".";
        case RK::intersection_ll:
            return X + " is the intersection of line " + up(in[0]) + up(in[1]) +
                   " and line " + up(in[2]) + up(in[3]) + ".";
        case RK::on_line:
            return X + " lies on line " + up(in[0]) + up(in[1]) + ".";
        case RK::intersection_lp:
            return X + " is the intersection of line " + up(in[0]) + up(in[1]) +
                   " with the line through " + up(in[2]) + " parallel to " +
                   up(in[3]) + up(in[4]) + ".";
        case RK::intersection_lt:
            return X + " is the intersection of line " + up(in[0]) + up(in[1]) +
                   " with the line through " + up(in[2]) + " perpendicular to " +
                   up(in[3]) + up(in[4]) + ".";
        case RK::intersection_pp:
            return X + " is the intersection of the line through " + up(in[0]) +
                   " parallel to " + up(in[1]) + up(in[2]) +
                   " and the line through " + up(in[3]) + " parallel to " +
                   up(in[4]) + up(in[5]) + ".";
        case RK::intersection_tt:
            return X + " is the intersection of the line through " + up(in[0]) +
                   " perpendicular to " + up(in[1]) + up(in[2]) +
                   " and the line through " + up(in[3]) + " perpendicular to " +
                   up(in[4]) + up(in[5]) + ".";
        case RK::lc_tangent:
            return X + " lies on the tangent at " + up(in[0]) +
                   " to the circle centered at " + up(in[1]) + ".";
        case RK::midpoint:
            return X + " is the midpoint of segment " + up(in[0]) + up(in[1]) + ".";
        case RK::mirror:
            return X + " is the reflection of " + up(in[0]) + " through " +
                   up(in[1]) + ".";
        case RK::nsquare:
            return X + " is " + up(in[1]) + " rotated a quarter turn clockwise about " +
                   up(in[0]) + ".";
        case RK::on_circle:
            return X + " lies on the circle centered at " + up(in[0]) +
                   " passing through " + up(in[1]) + ".";
        case RK::on_pline:
            return X + " lies on the line through " + up(in[0]) + " parallel to " +
                   up(in[1]) + up(in[2]) + ".";
        case RK::on_tline:
            return X + " lies on the line through " + up(in[0]) +
                   " perpendicular to " + up(in[1]) + up(in[2]) + ".";
        case RK::on_dia:
            return X + " is placed so that angle " + up(in[0]) + X + up(in[1]) +
                   " is a right angle.";
        case RK::orthocenter:
            return X + " is the orthocenter of triangle " + join(in) + ".";
        case RK::parallelogram:
            return X + " completes parallelogram " + join(in) + X + ".";
        case RK::psquare:
            return X + " is " + up(in[1]) +
                   " rotated a quarter turn counterclockwise about " + up(in[0]) + ".";
        case RK::reflect:
            return X + " is the reflection of " + up(in[0]) + " across line " +
                   up(in[1]) + up(in[2]) + ".";
        case RK::s_angle:
            return X + " is placed so that angle " + up(in[0]) + up(in[1]) + X +
                   " measures " + angle_text(st.literal.value_or(0.0)) +
                   " degrees.";
        case RK::shift:
            return X + " is the translation of " + up(in[0]) +
                   " by the vector from " + up(in[2]) + " to " + up(in[1]) + ".";
        case RK::on_opline:
            return X + " lies on line " + up(in[0]) + up(in[1]) + " beyond " +
                   up(in[0]) + ", away from " + up(in[1]) + ".";
        case RK::eqangle3:
            return X + " is placed so that angle " + up(in[0]) + X + up(in[1]) +
                   " equals angle " + up(in[3]) + up(in[2]) + up(in[4]) + ".";
        case RK::on_circum:
            return X + " lies on the circle through " + up(in[0]) + ", " +
                   up(in[1]) + " and " + up(in[2]) + ".";
        case RK::square:
            return up(nw[0]) + " and " + up(nw[1]) + " complete square " +
                   up(in[0]) + up(in[1]) + up(nw[0]) + up(nw[1]) + ".";
        case RK::trisegment:
            return up(nw[0]) + " and " + up(nw[1]) + " divide segment " +
                   up(in[0]) + up(in[1]) + " into three equal parts.";
        case RK::trisect:
            return up(nw[0]) + " and " + up(nw[1]) + " lie on segment " +
                   up(in[0]) + up(in[2]) + " so that " + up(in[1]) + up(nw[0]) +
                   " and " + up(in[1]) + up(nw[1]) + " trisect angle " +
                   join(in) + ".";
        case RK::tangent:
            return up(nw[0]) + " and " + up(nw[1]) +
                   " are the points where the tangents from " + up(in[0]) +
                   " touch the circle centered at " + up(in[1]) + " through " +
                   up(in[2]) + ".";
    }
    return "";
}

std::string cumulative_caption(const ConstructionProgram& program, int upto) {
    std::string out;
    for (int k = 0; k <= upto && k < static_cast<int>(program.statements.size());
         ++k) {
        if (k) out += ' ';
        out += caption_for(program.statements[k]);
    }
    return out;
}

}  // namespace figkit
