// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "params.h"

#include "errors.h"

namespace volprim {

real getParam(const Frame &frame, const ParamLayout &layout, size_t i) {
    if (i < layout.payloadCount()) return frame.slab.payload[i];
    if (i < layout.vertexOffset()) {
        const size_t d = i - layout.deltaOffset();
        const int k = int(d / 9);
        const int c = int(d % 9);
        const PrimitiveTransform &xf = frame.transforms[k];
        if (c < 3) return xf.deltaT[c];
        if (c < 6) return xf.deltaR[c - 3];
        return xf.deltaS[c - 6];
    }
    if (i >= layout.total()) throw Error(ErrorCategory::Usage, "parameter index out of range");
    const size_t v = i - layout.vertexOffset();
    if (frame.vertexOffsets.empty()) return 0;
    return frame.vertexOffsets[v / 3][int(v % 3)];
}

void setParam(Frame &frame, const ParamLayout &layout, size_t i, real v) {
    if (i < layout.payloadCount()) {
        frame.slab.payload[i] = v;
        return;
    }
    if (i < layout.vertexOffset()) {
        const size_t d = i - layout.deltaOffset();
        const int k = int(d / 9);
        const int c = int(d % 9);
        PrimitiveTransform &xf = frame.transforms[k];
        if (c < 3)
            xf.deltaT[c] = v;
        else if (c < 6)
            xf.deltaR[c - 3] = v;
        else
            xf.deltaS[c - 6] = v;
        return;
    }
    if (i >= layout.total()) throw Error(ErrorCategory::Usage, "parameter index out of range");
    if (frame.vertexOffsets.empty()) frame.vertexOffsets.assign(layout.nVerts, Vec3());
    const size_t off = i - layout.vertexOffset();
    frame.vertexOffsets[off / 3][int(off % 3)] = v;
}

} // namespace volprim
