// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "volprim/math.h"

using namespace volprim;

TEST_CASE("vector basics") {
    const Vec3 a(1, 2, 3), b(-2, 0.5, 4);
    CHECK(dot(a, b) == doctest::Approx(-2 + 1 + 12));
    const Vec3 c = cross(Vec3(1, 0, 0), Vec3(0, 1, 0));
    CHECK(c == Vec3(0, 0, 1));
    CHECK(length(Vec3(3, 4, 0)) == doctest::Approx(5));
    CHECK(lengthSq(normalize(a)) == doctest::Approx(1));
}

TEST_CASE("matrix storage is column-major") {
    const Mat3 m = Mat3::fromColumns(Vec3(1, 2, 3), Vec3(4, 5, 6), Vec3(7, 8, 9));
    CHECK(m(0, 0) == 1);
    CHECK(m(2, 0) == 3);
    CHECK(m(0, 1) == 4);
    CHECK(m.col(2) == Vec3(7, 8, 9));
    CHECK(m.row(0) == Vec3(1, 4, 7));
    CHECK(m.transpose()(1, 0) == m(0, 1));
}

TEST_CASE("matrix product against a hand-multiplied example") {
    const Mat3 a = Mat3::fromColumns(Vec3(1, 0, 2), Vec3(-1, 3, 1), Vec3(0, 2, -2));
    const Mat3 b = Mat3::fromColumns(Vec3(2, 1, 0), Vec3(0, -1, 4), Vec3(1, 0, 3));
    const Mat3 ab = a * b;
    // First column: 2*c0 + 1*c1 + 0*c2 = (2-1, 0+3, 4+1).
    CHECK(ab.col(0) == Vec3(1, 3, 5));
    // Second column: 0*c0 - 1*c1 + 4*c2 = (1, -3+8, -1-8).
    CHECK(ab.col(1) == Vec3(1, 5, -9));
    // Third column: 1*c0 + 0*c1 + 3*c2 = (1, 6, 2-6).
    CHECK(ab.col(2) == Vec3(1, 6, -4));
}

TEST_CASE("determinant and inverse") {
    const Mat3 m = Mat3::fromColumns(Vec3(2, 0, 1), Vec3(1, 3, 0), Vec3(0, -1, 4));
    // Cofactor expansion along the first row: 2*(12-0) - 1*(0+1) + 0 = 23.
    CHECK(m.det() == doctest::Approx(23));
    const Mat3 id = m * m.inverse();
    CHECK(id.maxAbsDiff(Mat3::identity()) < real(1e-5));
}

TEST_CASE("skew matrix reproduces the cross product") {
    const Vec3 v(0.4, -1.2, 2.0), u(3, 5, -7);
    const Vec3 a = Mat3::skew(v) * u;
    const Vec3 b = cross(v, u);
    CHECK(length(a - b) < real(1e-6));
}

TEST_CASE("hash is deterministic and maps to the unit interval") {
    CHECK(hashCombine(1, 2) == hashCombine(1, 2));
    CHECK(hashCombine(1, 2) != hashCombine(1, 3));
    CHECK(hashCombine(7, 0) != hashCombine(8, 0));
    for (uint64_t i = 0; i < 1000; ++i) {
        const real u = hashToUnit(hashCombine(42, i));
        CHECK(u >= 0);
        CHECK(u < 1);
    }
}
