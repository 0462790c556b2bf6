#pragma once

#include <cmath>

namespace shapegrad {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    /// Rotation by +90 degrees.
    Vec2 perp() const { return {-y, x}; }

    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Signed area of triangle (a,b,c); positive for counterclockwise order.
inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

/// Radius-ratio quality 2*inradius/circumradius in [0,1].
///
/// Evaluated from the side lengths in Heron form,
///   q = (-a+b+c)(a-b+c)(a+b-c) / (a*b*c),
/// which keeps the value exact for symmetric inputs and maps degenerate
/// (collinear or coincident) point triples to 0.
inline double triangle_quality(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    const double a = (p1 - p0).norm();
    const double b = (p2 - p1).norm();
    const double c = (p0 - p2).norm();
    const double denom = a * b * c;
    if (denom <= 0.0) return 0.0;
    const double f0 = -a + b + c;
    const double f1 = a - b + c;
    const double f2 = a + b - c;
    if (f0 <= 0.0 || f1 <= 0.0 || f2 <= 0.0) return 0.0;
    const double q = f0 * f1 * f2 / denom;
    return q > 1.0 ? 1.0 : q;
}

} // namespace shapegrad
