// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

// Double-precision build: finite-difference validation of the analytic
// derivative chain, where f32 rounding would drown the comparison.

#include <doctest.h>

#include <random>

#include "volprim/grad.h"
#include "volprim/synthetic.h"

using namespace volprim;

static_assert(sizeof(real) == 8, "these tests require the double-precision build");

TEST_CASE("rotation derivative matches Richardson finite differences") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const Vec3 v(real(uni(rng)), real(uni(rng)), real(uni(rng)));
        for (int i = 0; i < 3; ++i) {
            auto fd = [&](real h) {
                Vec3 vp = v, vm = v;
                vp[i] += h;
                vm[i] -= h;
                return (rotationFromAxisAngle(vp).matrix - rotationFromAxisAngle(vm).matrix) *
                       (1 / (2 * h));
            };
            const Mat3 d1 = fd(real(1e-5));
            const Mat3 d2 = fd(real(5e-6));
            const Mat3 richardson = (d2 * 4 - d1) * (real(1) / 3);
            CHECK(rotationDerivative(v, i).maxAbsDiff(richardson) < real(1e-8));
        }
    }
}

TEST_CASE("rotation derivative limit at the identity") {
    for (int i = 0; i < 3; ++i) {
        Vec3 e;
        e[i] = 1;
        CHECK(rotationDerivative(Vec3(), i).maxAbsDiff(Mat3::skew(e)) < real(1e-12));
    }
}

namespace {

// Small in-memory scene: a quad guide mesh carrying four textured primitives,
// viewed by three ring cameras.
struct GradScene {
    Scene scene;
    std::vector<Camera> cameras;
    std::vector<RaySample> batch;
    std::vector<Vec3> tracked;

    GradScene() {
        GuideMesh mesh;
        mesh.vertices = {Vec3(-0.5, -0.5, 0), Vec3(0.5, -0.5, 0), Vec3(0.5, 0.5, 0),
                         Vec3(-0.5, 0.5, 0)};
        mesh.uvs = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
        mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
        scene.mesh = mesh;
        scene.window = WindowParams{8, 8};

        Frame frame;
        frame.transforms = initFromMesh(mesh, 4);
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (auto &xf : frame.transforms) {
            // Generic pose: distinct flattening and orientation per primitive
            // so no two faces are coplanar.
            xf.deltaS = Vec3(real(uni(rng)) * real(0.02), real(uni(rng)) * real(0.02),
                             -xf.sBase.z * real(0.5 + 0.1 * uni(rng)));
            xf.deltaR = Vec3(real(uni(rng)), real(uni(rng)), real(uni(rng))) * real(0.15);
            xf.deltaT = Vec3(real(uni(rng)), real(uni(rng)), real(uni(rng))) * real(0.01);
        }
        frame.slab.resize(4, 4);
        for (size_t i = 0; i < frame.slab.payload.size(); ++i)
            frame.slab.payload[i] = real(0.2) + real(0.6) * real((i * 2654435761u % 101) / 101.0);
        // Boost the opacity channel so some rays saturate and some do not.
        for (int k = 0; k < 4; ++k)
            for (int v = 0; v < 4 * 4 * 4; ++v)
                frame.slab.payload[frame.slab.index(k, 3, v / 16, (v / 4) % 4, v % 4)] *= 12;
        scene.frames.push_back(frame);

        for (int c = 0; c < 3; ++c) {
            const double az = 2.1 * c + 0.4;
            const Vec3 pos(real(0.6 * std::cos(az)), real(0.6 * std::sin(az)), real(1.3));
            cameras.push_back(lookAtCamera(pos, Vec3(0, 0, 0), Vec3(0, 0, 1), 80, 64, 64));
        }

        std::mt19937_64 prng(7);
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 12; ++i) {
                RaySample rs;
                rs.cameraIndex = c;
                rs.pixelId = int(prng() % (64 * 64));
                rs.pixel = Vec2(real(rs.pixelId % 64) + real(0.5),
                                real(rs.pixelId / 64) + real(0.5));
                rs.target = Vec3(real(0.3), real(0.5), real(0.2));
                rs.background = Vec3(real(0.1), real(0.1), real(0.3));
                batch.push_back(rs);
            }
        for (const Vec3 &v : mesh.vertices) tracked.push_back(v + Vec3(0.01, -0.02, 0.03));
    }
};

} // namespace

TEST_CASE("analytic gradients of the full loss match finite differences") {
    GradScene gs;
    MarchConfig cfg;
    cfg.stepSize = real(0.004);
    cfg.earlyEps = real(1e-9);
    LossWeights weights; // all four terms active
    GradcheckReport report =
        gradcheck(gs.scene, 0, gs.cameras, gs.batch, gs.tracked, weights, cfg, 90, 13);
    REQUIRE(report.entries.size() == 90);
    int perGroup[6] = {0, 0, 0, 0, 0, 0};
    for (const auto &e : report.entries) perGroup[int(e.group)]++;
    for (int g = 0; g < 6; ++g) CHECK(perGroup[g] > 0);
    CHECK(report.maxRelError(ParamGroup::PayloadRgb) < real(1e-6));
    CHECK(report.maxRelError(ParamGroup::PayloadSigma) < real(1e-6));
    CHECK(report.maxRelError(ParamGroup::DeltaT) < real(1e-5));
    CHECK(report.maxRelError(ParamGroup::DeltaR) < real(1e-5));
    CHECK(report.maxRelError(ParamGroup::DeltaS) < real(1e-5));
    CHECK(report.maxRelError(ParamGroup::VertexOffset) < real(1e-8));
}

TEST_CASE("jittered marching stays differentiable") {
    GradScene gs;
    MarchConfig cfg;
    cfg.stepSize = real(0.004);
    cfg.earlyEps = real(1e-9);
    cfg.jitter = true;
    cfg.seed = 5;
    LossWeights weights;
    GradcheckReport report =
        gradcheck(gs.scene, 0, gs.cameras, gs.batch, gs.tracked, weights, cfg, 30, 29);
    CHECK(report.maxRelError() < real(1e-5));
}
