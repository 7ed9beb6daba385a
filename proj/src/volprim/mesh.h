// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rotation.h"

namespace volprim {

/// Coarse tracked triangle mesh with a per-vertex UV atlas. Supplies the
/// primitive base transforms and the target of the geometry loss.
struct GuideMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec2> uvs; // per vertex, in [0,1]^2

    void validate() const; // throws Format on bad indices / degenerate UV triangles
};

struct TangentFrame {
    Vec3 point;    // barycentric surface point
    Mat3 rotation; // columns: tangent, bitangent, normal
    int triangle;  // triangle that contained the uv query
};

/// Surface point and orthonormal tangent frame at a UV location. Ties between
/// overlapping UV charts go to the lowest triangle index. Throws Usage when no
/// triangle's UV footprint contains the query.
TangentFrame tangentFrame(const GuideMesh &mesh, const Vec2 &uv);

/// Non-throwing variant used by grid initialization to skip off-chart cells.
std::optional<TangentFrame> tryTangentFrame(const GuideMesh &mesh, const Vec2 &uv);

/// Per-axis world-space scale of a UV grid cell: |dx/du| and |dx/dv| times the
/// grid spacing for the tangent axes, their geometric mean for the normal axis.
Vec3 uvScaleGradient(const GuideMesh &mesh, const Vec2 &uv, real gridSpacing);

/// OBJ restricted to v / vt records and f records of the form v/vt.
GuideMesh loadObj(const std::string &path);
void saveObj(const GuideMesh &mesh, const std::string &path);

} // namespace volprim
