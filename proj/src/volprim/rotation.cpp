// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "rotation.h"

namespace volprim {

Rotation rotationFromAxisAngle(const Vec3 &v) {
    Rotation rot;
    rot.axisAngle = v;
    const real t2 = lengthSq(v);
    if (t2 == 0) {
        rot.matrix = Mat3::identity();
        return rot;
    }
    const real theta = std::sqrt(t2);
    real a, b; // sin(t)/t, (1-cos(t))/t^2
    if (theta < real(1e-4)) {
        a = 1 - t2 / 6;
        b = real(0.5) - t2 / 24;
    } else {
        a = std::sin(theta) / theta;
        b = (1 - std::cos(theta)) / t2;
    }
    const Mat3 k = Mat3::skew(v);
    rot.matrix = Mat3::identity() + k * a + (k * k) * b;
    return rot;
}

Mat3 rotationDerivative(const Vec3 &v, int i) {
    const real t2 = lengthSq(v);
    Vec3 e(0, 0, 0);
    e[i] = 1;
    if (t2 < real(1e-14)) return Mat3::skew(e);
    const Mat3 r = rotationFromAxisAngle(v).matrix;
    const Vec3 w = cross(v, (Mat3::identity() - r) * e);
    return (Mat3::skew(v) * v[i] + Mat3::skew(w)) * (1 / t2) * r;
}

Vec3 axisAngleFromMatrix(const Mat3 &r) {
    const real tr = r(0, 0) + r(1, 1) + r(2, 2);
    const real c = clamp((tr - 1) / 2, -1, 1);
    const real theta = std::acos(c);
    if (theta < real(1e-7)) return Vec3(0, 0, 0);
    Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    const real s = length(axis);
    if (s < real(1e-6)) {
        // Near pi: extract axis from the symmetric part.
        Vec3 d(std::sqrt(std::max<real>(0, (r(0, 0) + 1) / 2)),
               std::sqrt(std::max<real>(0, (r(1, 1) + 1) / 2)),
               std::sqrt(std::max<real>(0, (r(2, 2) + 1) / 2)));
        int k = 0;
        if (d.y > d[k]) k = 1;
        if (d.z > d[k]) k = 2;
        if (d[k] == 0) return Vec3(0, 0, 0);
        Vec3 axis2 = d;
        // Fix signs from off-diagonal terms relative to the largest component.
        if (k == 0) {
            axis2.y = (r(0, 1) + r(1, 0)) / (4 * d.x);
            axis2.z = (r(0, 2) + r(2, 0)) / (4 * d.x);
        } else if (k == 1) {
            axis2.x = (r(0, 1) + r(1, 0)) / (4 * d.y);
            axis2.z = (r(1, 2) + r(2, 1)) / (4 * d.y);
        } else {
            axis2.x = (r(0, 2) + r(2, 0)) / (4 * d.z);
            axis2.y = (r(1, 2) + r(2, 1)) / (4 * d.z);
        }
        return normalize(axis2) * theta;
    }
    return axis * (theta / s);
}

} // namespace volprim
