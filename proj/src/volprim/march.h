// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "image.h"
#include "lbvh.h"

namespace volprim {

struct MarchConfig {
    real stepSize = real(0.001); // meters
    real earlyEps = real(0.01);  // terminate once T > 1 - earlyEps
    bool jitter = false;         // per-ray stratified sample offset in [0, stepSize)
    uint64_t seed = 0;           // jitter stream

    // Test hook: shuffles the per-sample accumulation order of overlapping
    // primitives when nonzero. 0 keeps BVH (ascending t_enter) order.
    uint64_t accumulationPermutation = 0;
};

struct MarchResult {
    Vec3 rgb;
    real alpha = 0;
    int samples = 0;
    bool saturated = false;

    // Replay bookkeeping consumed by the backward pass.
    int64_t lastStep = -1;   // quadrature index of the last evaluated sample
    real satTPrev = 0;       // accumulated opacity entering the saturating step
    real satSigmaSum = 0;    // opacity sum at the saturating step
    Vec3 satRgbWeighted;     // color integrand at the saturating step
};

struct Scene;

/// Additive front-to-back quadrature along one ray. Samples sit at
/// t_min + (i + xi) * stepSize with xi = 0.5 (plus optional jitter); at each
/// sample the windowed (rgb*sigma, sigma) of every covering primitive is
/// summed, transmittance accumulates as a clamped integral, and the saturating
/// step contributes only its unsaturated fraction.
MarchResult march(const Ray &ray, const RaySegmentList &segs, const PrimitiveSlab &slab,
                  const std::vector<AffineXf> &xfs, const WindowParams &window,
                  const MarchConfig &cfg, real jitter01 = real(0.5));

struct RenderOutput {
    Image color;  // H x W x 3
    Image alpha;  // H x W x 1
    std::vector<int> sampleCounts; // per pixel, diagnostics

    int64_t totalSamples() const {
        int64_t s = 0;
        for (int c : sampleCounts) s += c;
        return s;
    }
};

/// One march per pixel. Deterministic for a fixed seed; parallel over rows.
RenderOutput render(const Scene &scene, int frame, const Camera &cam, const MarchConfig &cfg);

/// A * I + (1 - A) * B per pixel. Throws Usage on dimension mismatch.
Image composite(const RenderOutput &out, const Image &background);

} // namespace volprim
