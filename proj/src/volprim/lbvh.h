// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "camera.h"
#include "primitive.h"

namespace volprim {

struct Aabb {
    Vec3 lo = Vec3(std::numeric_limits<real>::max());
    Vec3 hi = Vec3(std::numeric_limits<real>::lowest());

    void expand(const Vec3 &p) {
        lo = cwiseMin(lo, p);
        hi = cwiseMax(hi, p);
    }
    void expand(const Aabb &b) {
        lo = cwiseMin(lo, b.lo);
        hi = cwiseMax(hi, b.hi);
    }
    bool contains(const Aabb &b) const {
        return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z && hi.x >= b.hi.x &&
               hi.y >= b.hi.y && hi.z >= b.hi.z;
    }
};

/// World-space bounds of the transformed [-1,1]^3 cube.
Aabb primitiveAabb(const AffineXf &xf);

/// 30-bit Morton code, 10 bits per axis, x in the least significant bit.
/// Points are clamped to the scene bounds before quantization.
uint32_t mortonCode(const Vec3 &p, const Aabb &sceneBounds);

/// Binary radix tree over Morton-sorted leaves (duplicate codes broken by
/// primitive index). Internal nodes precede leaves in the node array.
struct Lbvh {
    struct Node {
        Aabb bounds;
        int left = -1;   // node index; -1 for leaves
        int right = -1;
        int primitive = -1; // leaf payload
        bool isLeaf() const { return primitive >= 0; }
    };

    std::vector<Node> nodes;
    int root = -1;
};

/// Rebuilt per frame. Throws Usage on empty input.
Lbvh buildLbvh(const std::vector<Aabb> &aabbs);

struct SegEntry {
    int primitive;
    real tEnter;
    real tExit;
};

/// Per-ray intersected primitive list, sorted by entry distance, with the
/// integration domain [tMin, tMax].
struct RaySegmentList {
    std::vector<SegEntry> segments;
    real tMin = 0;
    real tMax = 0;
};

/// Oriented slab test in the primitive's model space. Returns false on miss
/// (tExit <= max(tEnter, 0)). entryAxis/entrySign identify the face that
/// realizes tEnter; enterClamped is set when the origin is inside the box.
struct ObbHit {
    real tEnter, tExit;
    int entryAxis;
    int entrySign;
    bool enterClamped;
};
bool intersectObb(const AffineXf &xf, const Ray &ray, ObbHit &hit);

/// Exact oriented-box test against every BVH candidate; equivalent to brute
/// force over all primitives.
RaySegmentList intersect(const Lbvh &bvh, const std::vector<AffineXf> &xfs, const Ray &ray);

} // namespace volprim
