// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "scene.h"

namespace volprim {

/// Flat indexing over one frame's optimizable parameters:
/// [payload (nPrim*4*M^3)] [per-primitive dt(3) dr(3) ds(3)] [vertex offsets].
struct ParamLayout {
    int nPrim = 0;
    int m = 0;
    size_t nVerts = 0;

    size_t payloadCount() const { return size_t(nPrim) * 4 * m * m * m; }
    size_t deltaOffset() const { return payloadCount(); }
    size_t deltaCount() const { return size_t(nPrim) * 9; }
    size_t vertexOffset() const { return deltaOffset() + deltaCount(); }
    size_t total() const { return vertexOffset() + nVerts * 3; }

    size_t deltaTIndex(int k) const { return deltaOffset() + size_t(k) * 9; }
    size_t deltaRIndex(int k) const { return deltaTIndex(k) + 3; }
    size_t deltaSIndex(int k) const { return deltaTIndex(k) + 6; }
    size_t vertexIndex(size_t v) const { return vertexOffset() + v * 3; }
};

inline ParamLayout layoutOf(const Frame &frame, size_t nVerts) {
    return {frame.slab.numPrimitives, frame.slab.voxelsPerAxis, nVerts};
}

real getParam(const Frame &frame, const ParamLayout &layout, size_t i);
void setParam(Frame &frame, const ParamLayout &layout, size_t i, real v);

/// Gradient mirror of the flat parameter vector.
struct GradBuffer {
    ParamLayout layout;
    std::vector<real> values;

    explicit GradBuffer(const ParamLayout &l) : layout(l), values(l.total(), 0) {}

    void zero() { std::fill(values.begin(), values.end(), 0); }
    void accumulate(const GradBuffer &other) {
        for (size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    }

    void addDeltaT(int k, const Vec3 &g) { addVec(layout.deltaTIndex(k), g); }
    void addDeltaR(int k, const Vec3 &g) { addVec(layout.deltaRIndex(k), g); }
    void addDeltaS(int k, const Vec3 &g) { addVec(layout.deltaSIndex(k), g); }
    void addVertex(size_t v, const Vec3 &g) { addVec(layout.vertexIndex(v), g); }
    void addVec(size_t base, const Vec3 &g) {
        values[base] += g.x;
        values[base + 1] += g.y;
        values[base + 2] += g.z;
    }
};

} // namespace volprim
