// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scene_io.h"

namespace volprim {

/// Desk-scale synthetic capture: a textured primitive scene over a quad guide
/// mesh, rendered from a camera ring by this renderer itself. The ground-truth
/// scene doubles as the self-reconstruction oracle.
struct SyntheticConfig {
    int nPrim = 16;       // perfect square
    int m = 8;            // voxels per axis
    int nCameras = 9;     // last camera is held out
    int imageSize = 128;
    uint64_t seed = 1;
    real stepSize = real(0.002);
    real sigmaScale = 4;      // opacity amplitude of the ground-truth payload
    real misalignment = 0;    // tangent displacement of GT primitives, in units
                              // of primitive scale (0 = aligned with the mesh)
    std::string outDir;
};

struct SyntheticResult {
    std::string datasetPath;
    std::string gtScenePath;
    std::string initScenePath;
};

SyntheticResult makeSynthetic(const SyntheticConfig &cfg);

/// Camera on a ring looking at the origin; used by tests as well.
Camera lookAtCamera(const Vec3 &position, const Vec3 &target, const Vec3 &up, real focalPx,
                    int width, int height);

} // namespace volprim
