#pragma once

#include <cmath>

namespace figkit {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 unit(Vec2 a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

// Counterclockwise quarter turn.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline Vec2 rotate(Vec2 a, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    a = std::fmod(a, two_pi);
    if (a <= -3.14159265358979323846) a += two_pi;
    if (a > 3.14159265358979323846) a -= two_pi;
    return a;
}

// Interior angle at vertex v between rays v->p and v->q, in [0, pi].
inline double angle_at(Vec2 v, Vec2 p, Vec2 q) {
    return std::abs(wrap_angle(angle_of(p - v) - angle_of(q - v)));
}

inline double point_line_dist(Vec2 p, Vec2 a, Vec2 b) {
    double n = dist(a, b);
    if (n == 0.0) return dist(p, a);
    return std::abs(cross(b - a, p - a)) / n;
}

}  // namespace figkit
