#pragma once

#include <cmath>

namespace elast {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
// Rotation by -pi/2; for a CCW-oriented edge tangent this is the outward normal.
inline Vec2 rot_cw(Vec2 a) { return {a.y, -a.x}; }

// 2x2 matrix, row major; used for gradients of vector fields (rows = components).
struct Mat2 {
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] + o.a[i][j];
        return r;
    }
    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] - o.a[i][j];
        return r;
    }
    Mat2 operator*(double s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] * s;
        return r;
    }
    Mat2& operator+=(const Mat2& o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a[i][j] += o.a[i][j];
        return *this;
    }
};

inline Mat2 sym(const Mat2& g) {
    Mat2 s;
    s.a[0][0] = g.a[0][0];
    s.a[1][1] = g.a[1][1];
    s.a[0][1] = s.a[1][0] = 0.5 * (g.a[0][1] + g.a[1][0]);
    return s;
}

inline double trace(const Mat2& g) { return g.a[0][0] + g.a[1][1]; }

inline double inner(const Mat2& a, const Mat2& b) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += a.a[i][j] * b.a[i][j];
    return s;
}

// Matrix-vector product (rows of m dotted with v).
inline Vec2 mul(const Mat2& m, Vec2 v) {
    return {m.a[0][0] * v.x + m.a[0][1] * v.y, m.a[1][0] * v.x + m.a[1][1] * v.y};
}

// Scalar curl in 2D: the antisymmetric part of the gradient.
inline double curl2d(const Mat2& grad) { return grad.a[1][0] - grad.a[0][1]; }

} // namespace elast
