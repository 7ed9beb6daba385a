// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "primitive.h"

#include <cmath>

#include "errors.h"

namespace volprim {

static real powEven(real x, int beta) {
    // beta is even, so work with |x| and repeated squaring.
    real r = 1;
    real b = std::abs(x);
    int e = beta;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

real window(const Vec3 &p, const WindowParams &w) {
    if (w.alpha == 0) return 1;
    return std::exp(-w.alpha * (powEven(p.x, w.beta) + powEven(p.y, w.beta) + powEven(p.z, w.beta)));
}

Vec3 windowGradient(const Vec3 &p, const WindowParams &w) {
    if (w.alpha == 0) return Vec3(0, 0, 0);
    const real wv = window(p, w);
    const real c = -w.alpha * w.beta * wv;
    auto term = [&](real x) {
        const real p1 = powEven(x, w.beta - 2) * x; // x^(beta-1), keeps sign
        return c * p1;
    };
    return {term(p.x), term(p.y), term(p.z)};
}

AffineXf compose(const PrimitiveTransform &xf) {
    AffineXf out;
    out.scale = xf.sBase + xf.deltaS;
    if (out.scale.x <= 0 || out.scale.y <= 0 || out.scale.z <= 0)
        throw Error(ErrorCategory::Usage, "non-positive composed primitive scale");
    out.rot = rotationFromAxisAngle(xf.deltaR).matrix * xf.rBase;
    out.t = xf.tBase + xf.deltaT;
    return out;
}

TrilinearStencil trilinearStencil(int m, const Vec3 &pModel) {
    TrilinearStencil st;
    for (int a = 0; a < 3; ++a) {
        real u = (pModel[a] + 1) * real(0.5) * m - real(0.5);
        st.clamped[a] = false;
        if (u <= 0) {
            u = 0;
            st.clamped[a] = true;
        } else if (u >= m - 1) {
            u = real(m - 1);
            st.clamped[a] = true;
        }
        int i0 = int(std::floor(u));
        if (i0 > m - 2) i0 = std::max(0, m - 2);
        st.lo[a] = i0;
        st.frac[a] = m > 1 ? u - i0 : 0;
    }
    return st;
}

real cornerWeight(const TrilinearStencil &st, int cz, int cy, int cx) {
    const real wx = cx ? st.frac[0] : 1 - st.frac[0];
    const real wy = cy ? st.frac[1] : 1 - st.frac[1];
    const real wz = cz ? st.frac[2] : 1 - st.frac[2];
    return wx * wy * wz;
}

static real gatherChannel(const PrimitiveSlab &slab, int k, int channel, const TrilinearStencil &st) {
    const int m = slab.voxelsPerAxis;
    real acc = 0;
    for (int cz = 0; cz < 2; ++cz)
        for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
                const int z = std::min(st.lo[2] + cz, m - 1);
                const int y = std::min(st.lo[1] + cy, m - 1);
                const int x = std::min(st.lo[0] + cx, m - 1);
                acc += cornerWeight(st, cz, cy, cx) * slab.payload[slab.index(k, channel, z, y, x)];
            }
    return acc;
}

Vec3 stencilRgb(const PrimitiveSlab &slab, int k, const TrilinearStencil &st) {
    return {gatherChannel(slab, k, 0, st), gatherChannel(slab, k, 1, st),
            gatherChannel(slab, k, 2, st)};
}

real stencilSigma(const PrimitiveSlab &slab, int k, const TrilinearStencil &st) {
    return gatherChannel(slab, k, 3, st);
}

Vec3 stencilRgbGradient(const PrimitiveSlab &slab, int k, const TrilinearStencil &st, int channel) {
    const int m = slab.voxelsPerAxis;
    Vec3 grad(0, 0, 0);
    if (m == 1) return grad;
    // d(value)/d(pModel_a) = sum over corners of d(weight)/du_a * value * (M/2)
    for (int cz = 0; cz < 2; ++cz)
        for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
                const int z = std::min(st.lo[2] + cz, m - 1);
                const int y = std::min(st.lo[1] + cy, m - 1);
                const int x = std::min(st.lo[0] + cx, m - 1);
                const real v = slab.payload[slab.index(k, channel, z, y, x)];
                const real wx = cx ? st.frac[0] : 1 - st.frac[0];
                const real wy = cy ? st.frac[1] : 1 - st.frac[1];
                const real wz = cz ? st.frac[2] : 1 - st.frac[2];
                const real dx = cx ? 1 : real(-1);
                const real dy = cy ? 1 : real(-1);
                const real dz = cz ? 1 : real(-1);
                grad.x += dx * wy * wz * v;
                grad.y += wx * dy * wz * v;
                grad.z += wx * wy * dz * v;
            }
    const real s = real(0.5) * m;
    for (int a = 0; a < 3; ++a)
        if (st.clamped[a]) grad[a] = 0;
    return grad * s;
}

SampleValue sample(const PrimitiveSlab &slab, int k, const Vec3 &pModel, const WindowParams &w) {
    constexpr real eps = real(1e-6);
    for (int a = 0; a < 3; ++a)
        if (pModel[a] < -1 - eps || pModel[a] > 1 + eps)
            throw Error(ErrorCategory::Usage, "sample point outside primitive cube");
    const Vec3 p = cwiseMax(Vec3(-1, -1, -1), cwiseMin(Vec3(1, 1, 1), pModel));
    const TrilinearStencil st = trilinearStencil(slab.voxelsPerAxis, p);
    SampleValue sv;
    sv.rgb = stencilRgb(slab, k, st);
    sv.sigma = stencilSigma(slab, k, st) * window(p, w);
    return sv;
}

std::vector<PrimitiveTransform> initFromMesh(const GuideMesh &mesh, int nPrim) {
    const int g = int(std::lround(std::sqrt(double(nPrim))));
    if (g * g != nPrim)
        throw Error(ErrorCategory::Usage, "primitive count must be a perfect square");
    mesh.validate();
    std::vector<PrimitiveTransform> out;
    const real spacing = real(1) / g;
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < g; ++i) {
            const Vec2 uv((i + real(0.5)) * spacing, (j + real(0.5)) * spacing);
            const auto frame = tryTangentFrame(mesh, uv);
            if (!frame) continue;
            PrimitiveTransform xf;
            xf.tBase = frame->point;
            xf.rBase = frame->rotation;
            xf.sBase = uvScaleGradient(mesh, uv, spacing);
            out.push_back(xf);
        }
    if (int(out.size()) < nPrim / 2)
        throw Error(ErrorCategory::Usage, "degenerate atlas: too few grid cells on the mesh");
    return out;
}

} // namespace volprim
