// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "grad.h"

#include <algorithm>
#include <random>

#include "errors.h"

namespace volprim {

namespace {

struct PrimSample {
    int seg;
    int prim;
    Vec3 pModel;        // clamped into [-1,1]^3
    bool cubeClamped[3];
    TrilinearStencil st;
    real sigmaRaw;
    real win;
    Vec3 rgb;
};

// Cached axis-angle derivatives of one primitive's delta rotation.
struct RotDerivs {
    Mat3 d[3];
    bool ready = false;
};

} // namespace

void backwardRay(const Ray &ray, const RaySegmentList &segs, const Frame &frame,
                 const std::vector<AffineXf> &xfs, const WindowParams &window,
                 const MarchConfig &cfg, real jitter01, const Vec3 &aRgb, real aAlpha,
                 GradBuffer &grads) {
    if (segs.segments.empty()) return;

    // Pass 1: replay the forward march to locate saturation / termination.
    const MarchResult fwd = march(ray, segs, frame.slab, xfs, window, cfg, jitter01);
    if (fwd.lastStep < 0) return;

    const PrimitiveSlab &slab = frame.slab;
    const real dt = cfg.stepSize;
    const real t0 = segs.tMin;
    const int nSegs = int(segs.segments.size());

    std::vector<RotDerivs> rotDerivs(frame.transforms.size());
    auto derivs = [&](int k) -> const RotDerivs & {
        RotDerivs &rd = rotDerivs[k];
        if (!rd.ready) {
            for (int i = 0; i < 3; ++i) rd.d[i] = rotationDerivative(frame.transforms[k].deltaR, i);
            rd.ready = true;
        }
        return rd;
    };

    std::vector<int> active;
    active.reserve(8);
    std::vector<PrimSample> samples;
    samples.reserve(8);
    int next = 0;
    real gTmin = 0;

    for (int64_t i = 0; i <= fwd.lastStep; ++i) {
        const real ts = t0 + (real(i) + jitter01) * dt;
        if (ts >= segs.tMax) break;

        while (next < nSegs && segs.segments[next].tEnter <= ts) active.push_back(next++);
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](int s) { return segs.segments[s].tExit <= ts; }),
                     active.end());
        if (active.empty()) {
            if (next >= nSegs) break;
            const real tNext = segs.segments[next].tEnter;
            const int64_t skipTo = int64_t(std::ceil((tNext - t0) / dt - double(jitter01)));
            if (skipTo > i + 1) i = skipTo - 1;
            continue;
        }

        const Vec3 pWorld = ray.origin + ray.direction * ts;
        samples.clear();
        real sigmaSum = 0;
        Vec3 rgbWeighted;
        for (int s : active) {
            PrimSample ps;
            ps.seg = s;
            ps.prim = segs.segments[s].primitive;
            const Vec3 raw = xfs[ps.prim].toModel(pWorld);
            for (int a = 0; a < 3; ++a) ps.cubeClamped[a] = raw[a] <= -1 || raw[a] >= 1;
            ps.pModel = cwiseMax(Vec3(-1, -1, -1), cwiseMin(Vec3(1, 1, 1), raw));
            ps.st = trilinearStencil(slab.voxelsPerAxis, ps.pModel);
            ps.sigmaRaw = stencilSigma(slab, ps.prim, ps.st);
            ps.win = volprim::window(ps.pModel, window);
            ps.rgb = stencilRgb(slab, ps.prim, ps.st);
            sigmaSum += ps.sigmaRaw * ps.win;
            rgbWeighted += ps.rgb * (ps.sigmaRaw * ps.win);
            samples.push_back(ps);
        }

        const bool satStep = fwd.saturated && i == fwd.lastStep;
        Vec3 gPWorldStep;
        for (const PrimSample &ps : samples) {
            const real sigmaW = ps.sigmaRaw * ps.win;
            Vec3 gRgb;   // d loss / d rgb_k(sample)
            real gSigmaW; // d loss / d sigmaW_k(sample)
            if (satStep) {
                const real budget = 1 - fwd.satTPrev;
                const real inv = 1 / fwd.satSigmaSum;
                gRgb = aRgb * (sigmaW * budget * inv);
                gSigmaW = dot(aRgb, ps.rgb * fwd.satSigmaSum - rgbWeighted) * budget * inv * inv;
            } else {
                gRgb = aRgb * (sigmaW * dt);
                gSigmaW = dot(aRgb, ps.rgb) * dt;
                if (fwd.saturated) {
                    // Earlier opacity shrinks the budget left at the clamp.
                    gSigmaW -= dot(aRgb, fwd.satRgbWeighted) / fwd.satSigmaSum * dt;
                } else {
                    gSigmaW += aAlpha * dt;
                }
            }

            // Payload gradients through the trilinear stencil.
            const int m = slab.voxelsPerAxis;
            for (int cz = 0; cz < 2; ++cz)
                for (int cy = 0; cy < 2; ++cy)
                    for (int cx = 0; cx < 2; ++cx) {
                        const real w = cornerWeight(ps.st, cz, cy, cx);
                        if (w == 0) continue;
                        const int z = std::min(ps.st.lo[2] + cz, m - 1);
                        const int y = std::min(ps.st.lo[1] + cy, m - 1);
                        const int x = std::min(ps.st.lo[0] + cx, m - 1);
                        for (int c = 0; c < 3; ++c)
                            grads.values[slab.index(ps.prim, c, z, y, x)] += gRgb[c] * w;
                        grads.values[slab.index(ps.prim, 3, z, y, x)] += gSigmaW * ps.win * w;
                    }

            // Spatial gradient in model space.
            const Vec3 gradSigmaTri = stencilRgbGradient(slab, ps.prim, ps.st, 3);
            const Vec3 gradW = windowGradient(ps.pModel, window);
            Vec3 gP = (gradSigmaTri * ps.win + gradW * ps.sigmaRaw) * gSigmaW;
            for (int c = 0; c < 3; ++c)
                gP += stencilRgbGradient(slab, ps.prim, ps.st, c) * gRgb[c];
            for (int a = 0; a < 3; ++a)
                if (ps.cubeClamped[a]) gP[a] = 0;
            if (gP.x == 0 && gP.y == 0 && gP.z == 0) continue;

            const AffineXf &xf = xfs[ps.prim];
            const Vec3 gOverS = gP.cwiseDiv(xf.scale);
            const Vec3 rotG = xf.rot * gOverS;
            grads.addDeltaT(ps.prim, -rotG);
            grads.addDeltaS(ps.prim,
                            Vec3(-gP.x * ps.pModel.x / xf.scale.x, -gP.y * ps.pModel.y / xf.scale.y,
                                 -gP.z * ps.pModel.z / xf.scale.z));
            const Vec3 u = pWorld - xf.t;
            const Vec3 v = frame.transforms[ps.prim].rBase * gOverS;
            const RotDerivs &rd = derivs(ps.prim);
            grads.addDeltaR(ps.prim, Vec3(dot(rd.d[0] * v, u), dot(rd.d[1] * v, u),
                                          dot(rd.d[2] * v, u)));
            gPWorldStep += rotG;
        }
        gTmin += dot(gPWorldStep, ray.direction);
    }

    // Sample positions are anchored at t_min, so shifting the nearest entry
    // face moves every sample along the ray.
    if (gTmin != 0) {
        const int k0 = segs.segments.front().primitive;
        ObbHit hit;
        if (intersectObb(xfs[k0], ray, hit) && !hit.enterClamped) {
            const AffineXf &xf = xfs[k0];
            const int j = hit.entryAxis;
            const real c = real(hit.entrySign);
            const Vec3 q = xf.rot.col(j);
            const real qd = dot(q, ray.direction);
            if (qd != 0) {
                const real tStar = segs.tMin;
                grads.addDeltaT(k0, q * (gTmin / qd));
                Vec3 gS;
                gS[j] = gTmin * c / qd;
                grads.addDeltaS(k0, gS);
                const Vec3 toT = xf.t - ray.origin;
                const Vec3 rj = frame.transforms[k0].rBase.col(j);
                const RotDerivs &rd = derivs(k0);
                Vec3 gR;
                for (int i = 0; i < 3; ++i) {
                    const Vec3 qp = rd.d[i] * rj;
                    gR[i] = gTmin * (dot(qp, toT) - tStar * dot(qp, ray.direction)) / qd;
                }
                grads.addDeltaR(k0, gR);
            }
        }
    }
}

LossTerms evalLoss(const Scene &scene, int frameIdx, const std::vector<Camera> &cams,
                   const std::vector<RaySample> &batch, const std::vector<Vec3> &trackedVerts,
                   const LossWeights &weights, const MarchConfig &cfg, GradBuffer *grads) {
    if (frameIdx < 0 || frameIdx >= int(scene.frames.size()))
        throw Error(ErrorCategory::Usage, "frame index out of range");
    const Frame &frame = scene.frames[frameIdx];
    const std::vector<AffineXf> xfs = frame.composed();
    std::vector<Aabb> boxes;
    boxes.reserve(xfs.size());
    for (const auto &xf : xfs) boxes.push_back(primitiveAabb(xf));
    const Lbvh bvh = buildLbvh(boxes);

    const size_t n = batch.size();
    std::vector<Vec3> composited(n), target(n);
    std::vector<Ray> rays(n);
    std::vector<RaySegmentList> segLists(n);
    std::vector<MarchResult> results(n);
    std::vector<real> jitters(n);

    for (size_t i = 0; i < n; ++i) {
        const RaySample &rs = batch[i];
        Ray ray = generateRay(cams[rs.cameraIndex], rs.pixel);
        ray.pixelId = rs.pixelId;
        rays[i] = ray;
        segLists[i] = intersect(bvh, xfs, ray);
        jitters[i] = cfg.jitter ? hashToUnit(hashCombine(
                                      cfg.seed, uint64_t(rs.cameraIndex) * 0x100000001b3ull +
                                                    uint64_t(rs.pixelId)))
                                : real(0.5);
        results[i] = march(rays[i], segLists[i], frame.slab, xfs, scene.window, cfg, jitters[i]);
        const real a = results[i].alpha;
        composited[i] = results[i].rgb * a + rs.background * (1 - a);
        target[i] = rs.target;
    }

    LossTerms terms;
    std::vector<Vec3> pixelAdjoints;
    terms.pho = lossPho(composited, target, weights.pho, grads ? &pixelAdjoints : nullptr);
    if (!trackedVerts.empty())
        terms.geo = lossGeo(scene.mesh, frame.vertexOffsets, trackedVerts, weights.geo, grads);
    terms.vol = lossVol(frame.transforms, weights.vol, grads);
    terms.del = lossDel(frame.transforms, weights.del, grads);

    if (grads) {
        for (size_t i = 0; i < n; ++i) {
            const real a = results[i].alpha;
            const Vec3 aI = pixelAdjoints[i]; // d loss / d composited pixel
            const Vec3 aRgb = aI * a;
            const real aAlpha = dot(aI, results[i].rgb - batch[i].background);
            backwardRay(rays[i], segLists[i], frame, xfs, scene.window, cfg, jitters[i], aRgb,
                        aAlpha, *grads);
        }
    }
    return terms;
}

const char *paramGroupName(ParamGroup g) {
    switch (g) {
    case ParamGroup::PayloadRgb: return "payload_rgb";
    case ParamGroup::PayloadSigma: return "payload_sigma";
    case ParamGroup::DeltaT: return "delta_t";
    case ParamGroup::DeltaR: return "delta_r";
    case ParamGroup::DeltaS: return "delta_s";
    case ParamGroup::VertexOffset: return "vertex_offset";
    }
    return "?";
}

real GradcheckReport::maxRelError(ParamGroup g) const {
    real m = 0;
    for (const auto &e : entries)
        if (e.group == g) m = std::max(m, e.relError);
    return m;
}

real GradcheckReport::maxRelError() const {
    real m = 0;
    for (const auto &e : entries) m = std::max(m, e.relError);
    return m;
}

static ParamGroup classify(const ParamLayout &layout, size_t idx, int m) {
    if (idx < layout.payloadCount()) {
        const size_t perChan = size_t(m) * m * m;
        const int channel = int((idx / perChan) % 4);
        return channel == 3 ? ParamGroup::PayloadSigma : ParamGroup::PayloadRgb;
    }
    if (idx < layout.vertexOffset()) {
        const int c = int((idx - layout.deltaOffset()) % 9);
        if (c < 3) return ParamGroup::DeltaT;
        if (c < 6) return ParamGroup::DeltaR;
        return ParamGroup::DeltaS;
    }
    return ParamGroup::VertexOffset;
}

GradcheckReport gradcheck(Scene &scene, int frameIdx, const std::vector<Camera> &cams,
                          const std::vector<RaySample> &batch,
                          const std::vector<Vec3> &trackedVerts, const LossWeights &weights,
                          const MarchConfig &cfg, int nParams, uint64_t seed) {
    Frame &frame = scene.frames[frameIdx];
    const ParamLayout layout = layoutOf(frame, scene.mesh.vertices.size());

    GradBuffer analytic(layout);
    evalLoss(scene, frameIdx, cams, batch, trackedVerts, weights, cfg, &analytic);

    // Sample coordinates round-robin over the groups so each is covered.
    std::mt19937_64 rng(seed);
    std::vector<std::vector<size_t>> pools(6);
    for (size_t i = 0; i < layout.total(); ++i)
        pools[size_t(classify(layout, i, layout.m))].push_back(i);
    std::vector<size_t> picks;
    for (int round = 0; int(picks.size()) < nParams; ++round) {
        bool any = false;
        for (auto &pool : pools) {
            if (pool.empty()) continue;
            any = true;
            const size_t j = rng() % pool.size();
            picks.push_back(pool[j]);
            pool[j] = pool.back();
            pool.pop_back();
            if (int(picks.size()) >= nParams) break;
        }
        if (!any) break;
    }

    GradcheckReport report;
    auto centralDiff = [&](size_t idx, real v0, real h) {
        setParam(frame, layout, idx, v0 + h);
        const real lp = evalLoss(scene, frameIdx, cams, batch, trackedVerts, weights, cfg).total();
        setParam(frame, layout, idx, v0 - h);
        const real lm = evalLoss(scene, frameIdx, cams, batch, trackedVerts, weights, cfg).total();
        setParam(frame, layout, idx, v0);
        return (lp - lm) / (2 * h);
    };
    for (size_t idx : picks) {
        const real v0 = getParam(frame, layout, idx);
        const real scale = std::max<real>(std::abs(v0), real(0.5));
        // Richardson-extrapolated central difference (h^4 truncation). The
        // loss is only piecewise smooth in the geometric parameters (samples
        // cross primitive faces and clamp bands), and a stencil straddling
        // such a kink settles on a biased plateau whose successive estimates
        // still drift slowly. Shrink h until two estimates agree tightly:
        // plateau pairs miss the tight gap, a stencil inside one smooth piece
        // meets it.
        const real hMin = scale * (sizeof(real) == 8 ? real(1e-8) : real(5e-4));
        const real gapTol = sizeof(real) == 8 ? real(1e-7) : real(1e-3);
        real fd = 0;
        real bestGap = std::numeric_limits<real>::infinity();
        real prev = centralDiff(idx, v0, real(1e-4) * scale);
        for (real h = real(5e-5) * scale; h >= hMin; h /= 2) {
            const real d2 = centralDiff(idx, v0, h);
            const real r = (4 * d2 - prev) / 3;
            const real gap = std::abs(prev - d2) / std::max<real>(std::abs(prev) + std::abs(d2),
                                                                  real(1e-4));
            if (gap < bestGap) {
                bestGap = gap;
                fd = r;
            }
            if (gap < gapTol) break;
            prev = d2;
        }
        const real a = analytic.values[idx];
        const real denom = std::max<real>(std::abs(a) + std::abs(fd), real(1e-4));
        GradcheckEntry e;
        e.group = classify(layout, idx, layout.m);
        e.index = idx;
        e.analytic = a;
        e.finiteDiff = fd;
        e.relError = std::abs(a - fd) / denom;
        report.entries.push_back(e);
    }
    return report;
}

} // namespace volprim
