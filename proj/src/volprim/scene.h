// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "march.h"
#include "mesh.h"
#include "primitive.h"

namespace volprim {

/// Per-frame optimizable state: transforms (with deltas), voxel payload, and
/// optional fitted vertex offsets on the guide mesh.
struct Frame {
    std::vector<PrimitiveTransform> transforms;
    PrimitiveSlab slab;
    std::vector<Vec3> vertexOffsets; // empty means all-zero

    std::vector<AffineXf> composed() const {
        std::vector<AffineXf> xfs;
        xfs.reserve(transforms.size());
        for (const auto &xf : transforms) xfs.push_back(compose(xf));
        return xfs;
    }
};

struct Scene {
    GuideMesh mesh;
    WindowParams window;
    MarchConfig march;
    std::vector<Frame> frames;
};

} // namespace volprim
