// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>

#include "grad.h"
#include "scene_io.h"

namespace volprim {

struct FitConfig {
    LossWeights weights;
    AdamConfig adam;
    real lrDecay = 1; // lr multiplier reached at the final iteration
    int iterations = 5000;
    int batchImages = 8;    // images drawn per iteration
    int raysPerImage = 256; // pixels sampled per image
    int evalEvery = 250;    // held-out PSNR cadence (0 disables)
    uint64_t seed = 1;
    MarchConfig march;
};

FitConfig loadFitConfig(const std::string &path);

/// Runtime view of one frame of the dataset.
struct FitData {
    std::vector<Camera> cameras;
    std::vector<Image> targets;     // per camera; empty Image when absent
    std::vector<Image> backgrounds; // per camera
    std::vector<Vec3> trackedVerts;
    std::vector<int> trainCameras;
    std::vector<int> heldoutCameras;
};

FitData loadFitData(const Dataset &ds, int frame);

/// Uniform pixel sampling without replacement from each listed image;
/// reproducible for a given generator state. Throws Usage when raysPerImage
/// exceeds the pixel count.
std::vector<RaySample> sampleRays(const FitData &data, const std::vector<int> &cameraIndices,
                                  int raysPerImage, std::mt19937_64 &rng);

struct FitIterationLog {
    int iteration;
    LossTerms terms;
    real heldoutPsnr; // NaN when not evaluated this iteration
};

struct FitResult {
    std::vector<FitIterationLog> log;
    real finalHeldoutPsnr = 0;
    real finalPho = 0;
};

real psnr(const Image &a, const Image &b);

/// Held-out PSNR of one camera (render, composite, compare).
real evalHeldout(const Scene &scene, int frame, const FitData &data, int camera,
                 const MarchConfig &cfg);

/// Inverse-rendering loop: sample rays, rebuild the BVH, march, backpropagate,
/// Adam-update. Aborts with Numeric (after a state dump) if the loss diverges.
/// metricsCsv may be empty to skip logging to disk.
FitResult fit(Scene &scene, int frame, const FitData &data, const FitConfig &cfg,
              const std::string &metricsCsv);

} // namespace volprim
