// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "lbvh.h"

#include <algorithm>
#include <bit>

#include "errors.h"

namespace volprim {

Aabb primitiveAabb(const AffineXf &xf) {
    Aabb box;
    for (int c = 0; c < 8; ++c) {
        const Vec3 corner(c & 1 ? 1 : -1, c & 2 ? 1 : -1, c & 4 ? 1 : -1);
        box.expand(xf.toWorld(corner));
    }
    return box;
}

static uint32_t spreadBits10(uint32_t x) {
    x &= 0x3ff;
    x = (x | (x << 16)) & 0x030000ff;
    x = (x | (x << 8)) & 0x0300f00f;
    x = (x | (x << 4)) & 0x030c30c3;
    x = (x | (x << 2)) & 0x09249249;
    return x;
}

uint32_t mortonCode(const Vec3 &p, const Aabb &bounds) {
    uint32_t q[3];
    for (int a = 0; a < 3; ++a) {
        const real ext = bounds.hi[a] - bounds.lo[a];
        real u = ext > 0 ? (p[a] - bounds.lo[a]) / ext : 0;
        u = clamp(u, 0, 1);
        int cell = int(u * 1024);
        if (cell > 1023) cell = 1023;
        q[a] = uint32_t(cell);
    }
    return spreadBits10(q[0]) | (spreadBits10(q[1]) << 1) | (spreadBits10(q[2]) << 2);
}

namespace {

// 64-bit sort keys (morton << 32 | leaf index) are unique, so the radix tree
// is well defined and its depth is bounded by the key length.
struct Builder {
    const std::vector<uint64_t> &keys;
    int n;

    int delta(int i, int j) const {
        if (j < 0 || j >= n) return -1;
        return std::countl_zero(keys[i] ^ keys[j]);
    }

    // Karras-style range and split determination for internal node i.
    void node(int i, int &first, int &last, int &split) const {
        const int d = delta(i, i + 1) >= delta(i, i - 1) ? 1 : -1;
        const int deltaMin = delta(i, i - d);
        int lmax = 2;
        while (delta(i, i + lmax * d) > deltaMin) lmax *= 2;
        int l = 0;
        for (int t = lmax / 2; t >= 1; t /= 2)
            if (delta(i, i + (l + t) * d) > deltaMin) l += t;
        const int j = i + l * d;
        const int deltaNode = delta(i, j);
        int s = 0;
        for (int t = (l + 1) / 2;; t = (t + 1) / 2) {
            if (delta(i, i + (s + t) * d) > deltaNode) s += t;
            if (t == 1) break;
        }
        split = i + s * d + std::min(d, 0);
        first = std::min(i, j);
        last = std::max(i, j);
    }
};

} // namespace

Lbvh buildLbvh(const std::vector<Aabb> &aabbs) {
    const int n = int(aabbs.size());
    if (n == 0) throw Error(ErrorCategory::Usage, "cannot build BVH over zero boxes");

    Lbvh bvh;
    if (n == 1) {
        Lbvh::Node leaf;
        leaf.bounds = aabbs[0];
        leaf.primitive = 0;
        bvh.nodes.push_back(leaf);
        bvh.root = 0;
        return bvh;
    }

    Aabb scene;
    for (const Aabb &b : aabbs) {
        scene.expand(b.lo);
        scene.expand(b.hi);
    }

    std::vector<uint64_t> keys(n);
    for (int i = 0; i < n; ++i) {
        const Vec3 centroid = (aabbs[i].lo + aabbs[i].hi) * real(0.5);
        keys[i] = (uint64_t(mortonCode(centroid, scene)) << 32) | uint32_t(i);
    }
    std::sort(keys.begin(), keys.end());

    // Internal nodes occupy [0, n-2]; leaf i sits at node index n-1+i.
    bvh.nodes.resize(size_t(2) * n - 1);
    bvh.root = 0;
    for (int i = 0; i < n; ++i) {
        Lbvh::Node &leaf = bvh.nodes[n - 1 + i];
        const int prim = int(keys[i] & 0xffffffffu);
        leaf.primitive = prim;
        leaf.bounds = aabbs[prim];
    }

    const Builder builder{keys, n};
    for (int i = 0; i < n - 1; ++i) {
        int first, last, split;
        builder.node(i, first, last, split);
        Lbvh::Node &node = bvh.nodes[i];
        node.left = split == first ? n - 1 + split : split;
        node.right = split + 1 == last ? n - 1 + split + 1 : split + 1;
    }

    // Bottom-up bounds merge (children always have larger prefix depth, so a
    // reverse post-order via explicit stack suffices).
    std::vector<int> order;
    order.reserve(bvh.nodes.size());
    std::vector<int> stack{bvh.root};
    int maxDepth = 0;
    std::vector<int> depth(bvh.nodes.size(), 0);
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        order.push_back(idx);
        const Lbvh::Node &nd = bvh.nodes[idx];
        if (!nd.isLeaf()) {
            depth[nd.left] = depth[idx] + 1;
            depth[nd.right] = depth[idx] + 1;
            maxDepth = std::max({maxDepth, depth[nd.left], depth[nd.right]});
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    if (maxDepth >= 64) throw Error(ErrorCategory::Usage, "BVH deeper than traversal stack");
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Lbvh::Node &nd = bvh.nodes[*it];
        if (!nd.isLeaf()) {
            nd.bounds = bvh.nodes[nd.left].bounds;
            nd.bounds.expand(bvh.nodes[nd.right].bounds);
        }
    }
    return bvh;
}

static bool hitAabb(const Aabb &box, const Vec3 &o, const Vec3 &d) {
    real tNear = 0;
    real tFar = std::numeric_limits<real>::max();
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0) {
            if (o[a] < box.lo[a] || o[a] > box.hi[a]) return false;
            continue;
        }
        const real inv = 1 / d[a];
        real t1 = (box.lo[a] - o[a]) * inv;
        real t2 = (box.hi[a] - o[a]) * inv;
        if (t1 > t2) std::swap(t1, t2);
        tNear = std::max(tNear, t1);
        tFar = std::min(tFar, t2);
        if (tNear > tFar) return false;
    }
    return true;
}

bool intersectObb(const AffineXf &xf, const Ray &ray, ObbHit &hit) {
    const Vec3 om = xf.toModel(ray.origin);
    const Vec3 dm = (xf.rot.transpose() * ray.direction).cwiseDiv(xf.scale);
    real tEnter = -std::numeric_limits<real>::max();
    real tExit = std::numeric_limits<real>::max();
    hit.entryAxis = -1;
    for (int a = 0; a < 3; ++a) {
        if (dm[a] == 0) {
            if (om[a] < -1 || om[a] > 1) return false;
            continue;
        }
        const real inv = 1 / dm[a];
        const real cNear = dm[a] > 0 ? real(-1) : real(1);
        real t1 = (cNear - om[a]) * inv;
        real t2 = (-cNear - om[a]) * inv;
        if (t1 > tEnter) {
            tEnter = t1;
            hit.entryAxis = a;
            hit.entrySign = int(cNear);
        }
        tExit = std::min(tExit, t2);
    }
    hit.enterClamped = tEnter < 0;
    if (hit.enterClamped) tEnter = 0;
    if (tEnter >= tExit || tExit <= 0) return false;
    hit.tEnter = tEnter;
    hit.tExit = tExit;
    return true;
}

RaySegmentList intersect(const Lbvh &bvh, const std::vector<AffineXf> &xfs, const Ray &ray) {
    RaySegmentList out;
    if (bvh.root < 0) return out;
    int stack[64];
    int sp = 0;
    stack[sp++] = bvh.root;
    while (sp > 0) {
        const Lbvh::Node &node = bvh.nodes[stack[--sp]];
        if (!hitAabb(node.bounds, ray.origin, ray.direction)) continue;
        if (node.isLeaf()) {
            ObbHit hit;
            if (intersectObb(xfs[node.primitive], ray, hit))
                out.segments.push_back({node.primitive, hit.tEnter, hit.tExit});
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
    std::sort(out.segments.begin(), out.segments.end(), [](const SegEntry &a, const SegEntry &b) {
        return a.tEnter != b.tEnter ? a.tEnter < b.tEnter : a.primitive < b.primitive;
    });
    if (!out.segments.empty()) {
        out.tMin = out.segments.front().tEnter;
        out.tMax = 0;
        for (const SegEntry &s : out.segments) out.tMax = std::max(out.tMax, s.tExit);
    }
    return out;
}

} // namespace volprim
