// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace volprim {

#ifdef VOLPRIM_USE_DOUBLE
using real = double;
#else
using real = float;
#endif

struct Vec2 {
    real x = 0, y = 0;
    Vec2() = default;
    Vec2(real x_, real y_) : x(x_), y(y_) {}
    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(real s) const { return {x * s, y * s}; }
};

struct Vec3 {
    real x = 0, y = 0, z = 0;
    Vec3() = default;
    Vec3(real x_, real y_, real z_) : x(x_), y(y_), z(z_) {}
    explicit Vec3(real s) : x(s), y(s), z(s) {}

    real &operator[](int i) { return (&x)[i]; }
    real operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(real s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(real s) const { return {x / s, y / s, z / s}; }
    Vec3 &operator+=(const Vec3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 &operator-=(const Vec3 &o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3 &operator*=(real s) { x *= s; y *= s; z *= s; return *this; }
    bool operator==(const Vec3 &o) const { return x == o.x && y == o.y && z == o.z; }

    Vec3 cwiseMul(const Vec3 &o) const { return {x * o.x, y * o.y, z * o.z}; }
    Vec3 cwiseDiv(const Vec3 &o) const { return {x / o.x, y / o.y, z / o.z}; }
};

inline Vec3 operator*(real s, const Vec3 &v) { return v * s; }

inline real dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline real length(const Vec3 &v) { return std::sqrt(dot(v, v)); }
inline real lengthSq(const Vec3 &v) { return dot(v, v); }
inline Vec3 normalize(const Vec3 &v) { return v / length(v); }

inline Vec3 cwiseMin(const Vec3 &a, const Vec3 &b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 cwiseMax(const Vec3 &a, const Vec3 &b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

inline real clamp(real v, real lo, real hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Column-major 3x3 matrix.
struct Mat3 {
    real m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return Mat3{}; }
    static Mat3 zero() {
        Mat3 r;
        for (real &v : r.m) v = 0;
        return r;
    }
    static Mat3 fromColumns(const Vec3 &c0, const Vec3 &c1, const Vec3 &c2) {
        Mat3 r;
        r.m[0] = c0.x; r.m[1] = c0.y; r.m[2] = c0.z;
        r.m[3] = c1.x; r.m[4] = c1.y; r.m[5] = c1.z;
        r.m[6] = c2.x; r.m[7] = c2.y; r.m[8] = c2.z;
        return r;
    }
    static Mat3 diagonal(const Vec3 &d) {
        Mat3 r = zero();
        r.m[0] = d.x; r.m[4] = d.y; r.m[8] = d.z;
        return r;
    }
    // Cross-product matrix [v]x such that skew(v)*u == cross(v, u).
    static Mat3 skew(const Vec3 &v) {
        Mat3 r = zero();
        r(0, 1) = -v.z; r(0, 2) = v.y;
        r(1, 0) = v.z;  r(1, 2) = -v.x;
        r(2, 0) = -v.y; r(2, 1) = v.x;
        return r;
    }

    real &operator()(int row, int col) { return m[col * 3 + row]; }
    real operator()(int row, int col) const { return m[col * 3 + row]; }

    Vec3 col(int c) const { return {m[c * 3], m[c * 3 + 1], m[c * 3 + 2]}; }
    Vec3 row(int r) const { return {m[r], m[3 + r], m[6 + r]}; }

    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    Mat3 operator*(const Mat3 &o) const {
        Mat3 r = zero();
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i) r(i, c) += (*this)(i, k) * o(k, c);
        return r;
    }
    Vec3 operator*(const Vec3 &v) const {
        return col(0) * v.x + col(1) * v.y + col(2) * v.z;
    }
    Mat3 operator*(real s) const {
        Mat3 r = *this;
        for (real &v : r.m) v *= s;
        return r;
    }
    Mat3 operator+(const Mat3 &o) const {
        Mat3 r = *this;
        for (int i = 0; i < 9; ++i) r.m[i] += o.m[i];
        return r;
    }
    Mat3 operator-(const Mat3 &o) const {
        Mat3 r = *this;
        for (int i = 0; i < 9; ++i) r.m[i] -= o.m[i];
        return r;
    }

    real det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[3] * (m[1] * m[8] - m[2] * m[7]) +
               m[6] * (m[1] * m[5] - m[2] * m[4]);
    }

    Mat3 inverse() const {
        const Mat3 &a = *this;
        Mat3 r;
        real d = det();
        r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
        r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
        r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
        r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
        r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
        r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
        r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
        r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
        r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        return r * (real(1) / d);
    }

    real maxAbsDiff(const Mat3 &o) const {
        real d = 0;
        for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(m[i] - o.m[i]));
        return d;
    }
};

// splitmix64; used to derive per-ray jitter and stream seeds.
inline uint64_t hashCombine(uint64_t seed, uint64_t value) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull + value;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline real hashToUnit(uint64_t h) {
    return real(h >> 11) * real(1.0 / 9007199254740992.0);
}

} // namespace volprim
