#pragma once

#include <cmath>

namespace pks {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return a -= b; }
    friend constexpr Vec2 operator*(double s, Vec2 v) noexcept { return v *= s; }
    friend constexpr Vec2 operator*(Vec2 v, double s) noexcept { return v *= s; }
    friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Vec2 v) noexcept { return dot(v, v); }
inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }

}  // namespace pks
