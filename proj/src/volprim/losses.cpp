// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "losses.h"

#include <cmath>

#include "errors.h"

namespace volprim {

real lossPho(const std::vector<Vec3> &rendered, const std::vector<Vec3> &target, real lambda,
             std::vector<Vec3> *adjoints) {
    if (rendered.empty()) throw Error(ErrorCategory::Usage, "empty pixel set");
    if (rendered.size() != target.size())
        throw Error(ErrorCategory::Usage, "pixel set size mismatch");
    const real invN = real(1) / real(rendered.size());
    if (adjoints) adjoints->resize(rendered.size());
    real acc = 0;
    for (size_t i = 0; i < rendered.size(); ++i) {
        const Vec3 e = rendered[i] - target[i];
        acc += lengthSq(e);
        if (adjoints) (*adjoints)[i] = e * (2 * lambda * invN);
    }
    return lambda * invN * acc;
}

real lossGeo(const GuideMesh &base, const std::vector<Vec3> &offsets,
             const std::vector<Vec3> &tracked, real lambda, GradBuffer *grads) {
    if (tracked.size() != base.vertices.size())
        throw Error(ErrorCategory::Usage, "tracked vertex count mismatch");
    const size_t n = base.vertices.size();
    const real invN = real(1) / real(n);
    real acc = 0;
    for (size_t i = 0; i < n; ++i) {
        Vec3 fitted = base.vertices[i];
        if (!offsets.empty()) fitted += offsets[i];
        const Vec3 e = fitted - tracked[i];
        acc += lengthSq(e);
        if (grads) grads->addVertex(i, e * (2 * lambda * invN));
    }
    return lambda * invN * acc;
}

real lossVol(const std::vector<PrimitiveTransform> &xfs, real lambda, GradBuffer *grads) {
    real acc = 0;
    for (int k = 0; k < int(xfs.size()); ++k) {
        const Vec3 s = xfs[k].sBase + xfs[k].deltaS;
        acc += s.x * s.y * s.z;
        if (grads)
            grads->addDeltaS(k, Vec3(s.y * s.z, s.x * s.z, s.x * s.y) * lambda);
    }
    return lambda * acc;
}

real lossDel(const std::vector<PrimitiveTransform> &xfs, real lambda, GradBuffer *grads) {
    real acc = 0;
    for (int k = 0; k < int(xfs.size()); ++k) {
        const PrimitiveTransform &xf = xfs[k];
        acc += lengthSq(xf.deltaT) + lengthSq(xf.deltaR) + lengthSq(xf.deltaS);
        if (grads) {
            grads->addDeltaT(k, xf.deltaT * (2 * lambda));
            grads->addDeltaR(k, xf.deltaR * (2 * lambda));
            grads->addDeltaS(k, xf.deltaS * (2 * lambda));
        }
    }
    return lambda * acc;
}

void adamStep(Frame &frame, const ParamLayout &layout, const GradBuffer &grads, AdamState &state) {
    const size_t n = layout.total();
    if (grads.values.size() != n || state.m1.size() != n)
        throw Error(ErrorCategory::Usage, "gradient/state shape mismatch");
    for (real g : grads.values)
        if (!std::isfinite(g)) throw Error(ErrorCategory::Numeric, "non-finite gradient");

    state.step += 1;
    const AdamConfig &c = state.config;
    const real bc1 = 1 - std::pow(c.beta1, real(state.step));
    const real bc2 = 1 - std::pow(c.beta2, real(state.step));
    for (size_t i = 0; i < n; ++i) {
        const real g = grads.values[i];
        state.m1[i] = c.beta1 * state.m1[i] + (1 - c.beta1) * g;
        state.m2[i] = c.beta2 * state.m2[i] + (1 - c.beta2) * g * g;
        const real mHat = state.m1[i] / bc1;
        const real vHat = state.m2[i] / bc2;
        const real v = getParam(frame, layout, i);
        const real lr = c.lr * (i < layout.deltaOffset()    ? real(1)
                                : i < layout.vertexOffset() ? c.lrDeltaScale
                                                            : c.lrVertexScale);
        setParam(frame, layout, i, v - lr * mHat / (std::sqrt(vHat) + c.eps));
    }

    // Feasibility projection.
    for (size_t i = 0; i < layout.payloadCount(); ++i)
        if (frame.slab.payload[i] < 0) frame.slab.payload[i] = 0;
    for (int k = 0; k < layout.nPrim; ++k) {
        PrimitiveTransform &xf = frame.transforms[k];
        for (int a = 0; a < 3; ++a) {
            const real composed = xf.sBase[a] + xf.deltaS[a];
            if (composed < kMinScale) xf.deltaS[a] = kMinScale - xf.sBase[a];
        }
    }
}

} // namespace volprim
