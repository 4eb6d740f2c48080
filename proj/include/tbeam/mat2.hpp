#pragma once

#include <algorithm>
#include <cmath>

namespace tbeam {

struct Vec2 {
    double a = 0.0;
    double b = 0.0;

    Vec2& operator+=(const Vec2& o) { a += o.a; b += o.b; return *this; }
    Vec2& operator-=(const Vec2& o) { a -= o.a; b -= o.b; return *this; }
    Vec2& operator*=(double c) { a *= c; b *= c; return *this; }
};

inline Vec2 operator+(Vec2 u, const Vec2& v) { return u += v; }
inline Vec2 operator-(Vec2 u, const Vec2& v) { return u -= v; }
inline Vec2 operator*(double c, Vec2 u) { return u *= c; }
inline Vec2 operator*(Vec2 u, double c) { return u *= c; }
inline double dot(const Vec2& u, const Vec2& v) { return u.a * v.a + u.b * v.b; }

// 2x2 real matrix, row-major.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    static Mat2 zero() { return {}; }
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

    double operator()(int r, int c) const {
        return r == 0 ? (c == 0 ? m00 : m01) : (c == 0 ? m10 : m11);
    }
    double& operator()(int r, int c) {
        return r == 0 ? (c == 0 ? m00 : m01) : (c == 0 ? m10 : m11);
    }

    Mat2& operator+=(const Mat2& o) {
        m00 += o.m00; m01 += o.m01; m10 += o.m10; m11 += o.m11;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        m00 -= o.m00; m01 -= o.m01; m10 -= o.m10; m11 -= o.m11;
        return *this;
    }
    Mat2& operator*=(double c) {
        m00 *= c; m01 *= c; m10 *= c; m11 *= c;
        return *this;
    }

    Mat2 transpose() const { return {m00, m10, m01, m11}; }

    double det() const { return m00 * m11 - m01 * m10; }

    Mat2 inverse() const {
        const double d = det();
        return {m11 / d, -m01 / d, -m10 / d, m00 / d};
    }

    double max_abs() const {
        return std::max(std::max(std::fabs(m00), std::fabs(m01)),
                        std::max(std::fabs(m10), std::fabs(m11)));
    }

    double frobenius() const {
        return std::sqrt(m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11);
    }

    // Spectral norm (largest singular value).
    double norm2() const {
        const double f2 = m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11;
        const double d = det();
        const double disc = std::max(f2 * f2 - 4.0 * d * d, 0.0);
        return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
    }
};

inline Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
inline Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
inline Mat2 operator*(double c, Mat2 x) { return x *= c; }
inline Mat2 operator*(Mat2 x, double c) { return x *= c; }

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
            x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
}

inline Vec2 operator*(const Mat2& x, const Vec2& v) {
    return {x.m00 * v.a + x.m01 * v.b, x.m10 * v.a + x.m11 * v.b};
}

}  // namespace tbeam
