// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "math.h"

namespace volprim {

/// Rotation stored as an axis-angle vector alongside its matrix form.
struct Rotation {
    Vec3 axisAngle;
    Mat3 matrix;

    Rotation() = default;
};

/// Rodrigues' formula. The zero vector maps to the identity exactly; small
/// angles use the series expansions of sin(t)/t and (1-cos(t))/t^2.
Rotation rotationFromAxisAngle(const Vec3 &v);

/// Derivative of the rotation matrix with respect to axis-angle component i
/// (Gallego & Yezzi closed form, with the [e_i]x limit at v = 0).
Mat3 rotationDerivative(const Vec3 &v, int i);

/// Axis-angle vector of an orthonormal matrix (principal branch, angle in [0, pi]).
Vec3 axisAngleFromMatrix(const Mat3 &r);

} // namespace volprim
