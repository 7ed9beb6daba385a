// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "params.h"

namespace volprim {

struct LossWeights {
    real pho = 1;
    real geo = real(0.1);
    real vol = real(0.01);
    real del = real(0.01);
};

/// Mean squared pixel error times lambda. Optionally emits d(loss)/d(pixel).
/// Throws Usage on an empty or mismatched pixel set.
real lossPho(const std::vector<Vec3> &rendered, const std::vector<Vec3> &target, real lambda,
             std::vector<Vec3> *adjoints = nullptr);

/// Mean squared distance between fitted (base + offset) and tracked vertices.
real lossGeo(const GuideMesh &base, const std::vector<Vec3> &offsets,
             const std::vector<Vec3> &tracked, real lambda, GradBuffer *grads = nullptr);

/// lambda * sum_k prod(s_k) over composed scales; gradients flow to ds.
real lossVol(const std::vector<PrimitiveTransform> &xfs, real lambda,
             GradBuffer *grads = nullptr);

/// lambda * sum_k (|dt|^2 + |dr|^2 + |ds|^2).
real lossDel(const std::vector<PrimitiveTransform> &xfs, real lambda,
             GradBuffer *grads = nullptr);

struct AdamConfig {
    real lr = real(1e-4);
    real beta1 = real(0.9);
    real beta2 = real(0.999);
    real eps = real(1e-8);
    // Group-wise step multipliers. Payload values span units of color and
    // opacity while transform deltas are meters/radians, so they want very
    // different step sizes under a shared base lr.
    real lrDeltaScale = 1;
    real lrVertexScale = 1;
};

struct AdamState {
    AdamConfig config;
    std::vector<real> m1;
    std::vector<real> m2;
    int64_t step = 0;

    explicit AdamState(size_t n, const AdamConfig &cfg = {})
        : config(cfg), m1(n, 0), m2(n, 0) {}
};

/// Bias-corrected Adam update followed by the feasibility projection:
/// payload channels clamped to >= 0, composed scales to >= 1e-4 m.
/// Throws Numeric on non-finite gradients.
void adamStep(Frame &frame, const ParamLayout &layout, const GradBuffer &grads, AdamState &state);

constexpr real kMinScale = real(1e-4);

} // namespace volprim
