// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "losses.h"

namespace volprim {

/// One training ray: pixel identity, ground-truth composited color, and the
/// background color behind it.
struct RaySample {
    int cameraIndex = 0;
    Vec2 pixel;
    int pixelId = 0;
    Vec3 target;
    Vec3 background;
};

/// Adjoint of one marched ray. Replays the forward march twice (once to locate
/// the saturation point, once to distribute adjoints), so no per-sample tape is
/// stored. aRgb/aAlpha are d(loss)/d(pixel rgb) and d(loss)/d(alpha).
void backwardRay(const Ray &ray, const RaySegmentList &segs, const Frame &frame,
                 const std::vector<AffineXf> &xfs, const WindowParams &window,
                 const MarchConfig &cfg, real jitter01, const Vec3 &aRgb, real aAlpha,
                 GradBuffer &grads);

struct LossTerms {
    real pho = 0, geo = 0, vol = 0, del = 0;
    real total() const { return pho + geo + vol + del; }
};

/// Full loss stack over a ray batch for one frame: photometric term on the
/// composited ray colors plus the geometry / volume / delta priors. With a
/// gradient buffer the analytic adjoints of every term are accumulated.
/// trackedVerts may be empty to skip the geometry term.
LossTerms evalLoss(const Scene &scene, int frameIdx, const std::vector<Camera> &cams,
                   const std::vector<RaySample> &batch, const std::vector<Vec3> &trackedVerts,
                   const LossWeights &weights, const MarchConfig &cfg,
                   GradBuffer *grads = nullptr);

enum class ParamGroup { PayloadRgb, PayloadSigma, DeltaT, DeltaR, DeltaS, VertexOffset };
const char *paramGroupName(ParamGroup g);

struct GradcheckEntry {
    ParamGroup group;
    size_t index;
    real analytic;
    real finiteDiff;
    real relError;
};

struct GradcheckReport {
    std::vector<GradcheckEntry> entries;
    real maxRelError(ParamGroup g) const;
    real maxRelError() const;
};

/// Compares analytic gradients against central finite differences on randomly
/// sampled coordinates from every parameter group.
GradcheckReport gradcheck(Scene &scene, int frameIdx, const std::vector<Camera> &cams,
                          const std::vector<RaySample> &batch,
                          const std::vector<Vec3> &trackedVerts, const LossWeights &weights,
                          const MarchConfig &cfg, int nParams, uint64_t seed);

} // namespace volprim
