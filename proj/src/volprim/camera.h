// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "rotation.h"

namespace volprim {

struct Ray {
    Vec3 origin;
    Vec3 direction; // unit length
    int pixelId = -1;
};

/// Pinhole camera. World-to-camera convention: x_cam = R * x_world + t,
/// pixel = perspective divide of K * x_cam.
struct Camera {
    Mat3 intrinsics;
    Rotation rotation;
    Vec3 translation;
    int width = 0;
    int height = 0;

    Vec3 center() const { return -(rotation.matrix.transpose() * translation); }
};

/// Ray through an arbitrary pixel coordinate (pass px + 0.5 for pixel centers).
/// Throws Usage if the coordinate falls outside the image.
Ray generateRay(const Camera &cam, const Vec2 &pixel);

/// Projects a world point; returns pixel coordinates (origin at image corner).
Vec2 project(const Camera &cam, const Vec3 &world);

/// Camera calibration JSON: an array of
/// {"K": [9 row-major], "R_axis_angle": [3], "t": [3], "width", "height"}.
std::vector<Camera> loadCameras(const std::string &path);
void saveCameras(const std::vector<Camera> &cams, const std::string &path);

} // namespace volprim
