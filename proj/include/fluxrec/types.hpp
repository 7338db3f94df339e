#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace fluxrec {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 &operator+=(const Vec2 &o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2 &operator-=(const Vec2 &o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    constexpr Vec2 &operator*=(double s) {
        x *= s;
        y *= s;
        return *this;
    }
    friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
constexpr Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 2D cross product.
constexpr double cross(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }
constexpr Vec2 midpoint(const Vec2 &a, const Vec2 &b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    constexpr Vec2 operator*(const Vec2 &v) const { return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y}; }
    constexpr Mat2 &operator+=(const Mat2 &o) {
        a00 += o.a00;
        a01 += o.a01;
        a10 += o.a10;
        a11 += o.a11;
        return *this;
    }
    constexpr double trace() const { return a00 + a11; }
};

constexpr Mat2 operator*(double s, const Mat2 &m) { return {s * m.a00, s * m.a01, s * m.a10, s * m.a11}; }

using Barycentric = std::array<double, 3>;

}  // namespace fluxrec
