// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mesh.h"

namespace volprim {

/// Opacity fade window W(x,y,z) = exp(-alpha * (x^b + y^b + z^b)).
/// beta must be even so the window is symmetric and positive.
struct WindowParams {
    real alpha = 8;
    int beta = 8;
};

real window(const Vec3 &pModel, const WindowParams &w);
Vec3 windowGradient(const Vec3 &pModel, const WindowParams &w);

/// Concatenated RGBA voxel payload of all primitives. Layout is k-major,
/// channel-major, then z,y,x. The opacity channel stores the raw per-unit-length
/// density; the fade window is applied at sample time.
struct PrimitiveSlab {
    int numPrimitives = 0;
    int voxelsPerAxis = 0; // M, cubic grids

    std::vector<real> payload; // numPrimitives * 4 * M^3

    void resize(int nPrim, int m) {
        numPrimitives = nPrim;
        voxelsPerAxis = m;
        payload.assign(size_t(nPrim) * 4 * m * m * m, 0);
    }
    size_t index(int k, int channel, int z, int y, int x) const {
        const size_t m = voxelsPerAxis;
        return ((size_t(k) * 4 + channel) * m * m + size_t(z) * m + y) * m + x;
    }
    size_t paramCount() const { return payload.size(); }
};

/// Mesh-derived base transform plus learned deltas. Composition follows
/// t = t_hat + dt, R = R(dr) * R_hat, s = s_hat + ds.
struct PrimitiveTransform {
    Vec3 tBase;
    Mat3 rBase = Mat3::identity();
    Vec3 sBase = Vec3(1, 1, 1);
    Vec3 deltaT;
    Vec3 deltaR; // axis-angle
    Vec3 deltaS;
};

/// Composed world-from-model map: p_world = t + R * (s .* p_model).
struct AffineXf {
    Vec3 t;
    Mat3 rot;
    Vec3 scale;

    Vec3 toWorld(const Vec3 &pModel) const { return t + rot * scale.cwiseMul(pModel); }
    Vec3 toModel(const Vec3 &pWorld) const {
        return (rot.transpose() * (pWorld - t)).cwiseDiv(scale);
    }
};

/// Throws Usage if any composed scale component is non-positive.
AffineXf compose(const PrimitiveTransform &xf);

/// Voxel-center trilinear stencil for a model-space point in [-1,1]^3.
/// Centers sit at -1 + (2i+1)/M; the outer half-voxel band clamps to the edge
/// value, which zeroes the spatial derivative along the clamped axis.
struct TrilinearStencil {
    int lo[3];
    real frac[3];
    bool clamped[3];
};

TrilinearStencil trilinearStencil(int m, const Vec3 &pModel);

struct SampleValue {
    Vec3 rgb;
    real sigma; // windowed opacity
};

/// Trilinear payload lookup; opacity is multiplied by the fade window.
/// Throws Usage if pModel lies outside [-1,1]^3.
SampleValue sample(const PrimitiveSlab &slab, int k, const Vec3 &pModel, const WindowParams &w);

/// Raw channel lookup through a precomputed stencil (no window).
Vec3 stencilRgb(const PrimitiveSlab &slab, int k, const TrilinearStencil &st);
real stencilSigma(const PrimitiveSlab &slab, int k, const TrilinearStencil &st);
/// d(channel)/d(pModel); zero along clamped axes.
Vec3 stencilRgbGradient(const PrimitiveSlab &slab, int k, const TrilinearStencil &st, int channel);
real cornerWeight(const TrilinearStencil &st, int cz, int cy, int cx);

/// One base transform per UV-grid cell whose center lies on the mesh.
/// nPrim must be a perfect square; fails if fewer than nPrim/2 cells land
/// on the chart.
std::vector<PrimitiveTransform> initFromMesh(const GuideMesh &mesh, int nPrim);

} // namespace volprim
