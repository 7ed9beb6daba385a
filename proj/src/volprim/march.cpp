// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "march.h"

#include <algorithm>

#include "errors.h"
#include "scene.h"
#include "threads.h"

namespace volprim {

static Vec3 clampToCube(const Vec3 &p) {
    return cwiseMax(Vec3(-1, -1, -1), cwiseMin(Vec3(1, 1, 1), p));
}

MarchResult march(const Ray &ray, const RaySegmentList &segs, const PrimitiveSlab &slab,
                  const std::vector<AffineXf> &xfs, const WindowParams &window,
                  const MarchConfig &cfg, real jitter01) {
    MarchResult res;
    if (segs.segments.empty()) return res;

    const real dt = cfg.stepSize;
    const real t0 = segs.tMin;
    const int nSegs = int(segs.segments.size());

    std::vector<int> active; // indices into segs.segments
    active.reserve(8);
    int next = 0;
    real transmittance = 0;
    Vec3 color;

    for (int64_t i = 0;; ++i) {
        const real ts = t0 + (real(i) + jitter01) * dt;
        if (ts >= segs.tMax) break;

        while (next < nSegs && segs.segments[next].tEnter <= ts) active.push_back(next++);
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](int s) { return segs.segments[s].tExit <= ts; }),
                     active.end());
        if (active.empty()) {
            if (next >= nSegs) break;
            // Skip the gap to the next segment entry.
            const real tNext = segs.segments[next].tEnter;
            const int64_t skipTo = int64_t(std::ceil((tNext - t0) / dt - double(jitter01)));
            if (skipTo > i + 1) i = skipTo - 1;
            continue;
        }

        if (cfg.accumulationPermutation != 0) {
            // Deterministic per-sample shuffle; exercises order independence.
            for (size_t a = active.size(); a > 1; --a) {
                const uint64_t h = hashCombine(cfg.accumulationPermutation,
                                               uint64_t(i) * 1315423911u + a);
                std::swap(active[a - 1], active[h % a]);
            }
        }

        const Vec3 pWorld = ray.origin + ray.direction * ts;
        real sigmaSum = 0;
        Vec3 rgbWeighted;
        for (int s : active) {
            const int k = segs.segments[s].primitive;
            const Vec3 pModel = clampToCube(xfs[k].toModel(pWorld));
            const TrilinearStencil st = trilinearStencil(slab.voxelsPerAxis, pModel);
            const real sigma = stencilSigma(slab, k, st) * volprim::window(pModel, window);
            sigmaSum += sigma;
            rgbWeighted += stencilRgb(slab, k, st) * sigma;
        }
        ++res.samples;
        res.lastStep = i;

        const real dT = sigmaSum * dt;
        if (transmittance + dT >= 1) {
            const real frac = (1 - transmittance) / dT;
            color += rgbWeighted * (dt * frac);
            res.satTPrev = transmittance;
            res.satSigmaSum = sigmaSum;
            res.satRgbWeighted = rgbWeighted;
            transmittance = 1;
            res.saturated = true;
            break;
        }
        color += rgbWeighted * dt;
        transmittance += dT;
        if (transmittance > 1 - cfg.earlyEps) break;
    }

    res.rgb = color;
    res.alpha = transmittance;
    return res;
}

RenderOutput render(const Scene &scene, int frame, const Camera &cam, const MarchConfig &cfg) {
    if (frame < 0 || frame >= int(scene.frames.size()))
        throw Error(ErrorCategory::Usage, "frame index out of range");
    const Frame &fr = scene.frames[frame];
    const std::vector<AffineXf> xfs = fr.composed();

    RenderOutput out;
    out.color = Image(cam.width, cam.height, 3);
    out.alpha = Image(cam.width, cam.height, 1);
    out.sampleCounts.assign(size_t(cam.width) * cam.height, 0);

    if (xfs.empty()) return out;
    std::vector<Aabb> boxes;
    boxes.reserve(xfs.size());
    for (const auto &xf : xfs) boxes.push_back(primitiveAabb(xf));
    const Lbvh bvh = buildLbvh(boxes);

    parallelFor(0, cam.height, [&](int64_t y0, int64_t y1) {
        for (int64_t y = y0; y < y1; ++y)
            for (int x = 0; x < cam.width; ++x) {
                const int pixelId = int(y) * cam.width + x;
                Ray ray = generateRay(cam, Vec2(real(x) + real(0.5), real(y) + real(0.5)));
                ray.pixelId = pixelId;
                const RaySegmentList segs = intersect(bvh, xfs, ray);
                real jitter01 = real(0.5);
                if (cfg.jitter)
                    jitter01 = hashToUnit(hashCombine(cfg.seed, uint64_t(pixelId)));
                const MarchResult mr =
                    march(ray, segs, fr.slab, xfs, scene.window, cfg, jitter01);
                out.color.at(x, int(y), 0) = mr.rgb.x;
                out.color.at(x, int(y), 1) = mr.rgb.y;
                out.color.at(x, int(y), 2) = mr.rgb.z;
                out.alpha.at(x, int(y), 0) = mr.alpha;
                out.sampleCounts[size_t(pixelId)] = mr.samples;
            }
    });
    return out;
}

Image composite(const RenderOutput &out, const Image &background) {
    if (background.width != out.color.width || background.height != out.color.height ||
        background.channels != 3)
        throw Error(ErrorCategory::Usage, "background dimensions do not match render");
    Image result(out.color.width, out.color.height, 3);
    for (int y = 0; y < result.height; ++y)
        for (int x = 0; x < result.width; ++x) {
            const real a = out.alpha.at(x, y, 0);
            for (int c = 0; c < 3; ++c)
                result.at(x, y, c) =
                    a * out.color.at(x, y, c) + (1 - a) * background.at(x, y, c);
        }
    return result;
}

} // namespace volprim
