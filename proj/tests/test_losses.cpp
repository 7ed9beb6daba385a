// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "volprim/errors.h"
#include "volprim/losses.h"

using namespace volprim;

namespace {

Frame tinyFrame(int nPrim) {
    Frame fr;
    for (int k = 0; k < nPrim; ++k) {
        PrimitiveTransform xf;
        xf.sBase = Vec3(0.5, 0.4, 0.3);
        fr.transforms.push_back(xf);
    }
    fr.slab.resize(nPrim, 2);
    return fr;
}

} // namespace

TEST_CASE("photometric loss is the weighted mean squared error") {
    const std::vector<Vec3> rendered{Vec3(0.5, 0.5, 0.5), Vec3(1, 0, 0)};
    const std::vector<Vec3> target{Vec3(0.5, 0.5, 0.5), Vec3(0, 0, 1)};
    // Mean over pixels of |r - t|^2: (0 + 2) / 2 = 1, times lambda = 2.
    std::vector<Vec3> adj;
    const real l = lossPho(rendered, target, 2, &adj);
    CHECK(l == doctest::Approx(2.0));
    // d/d r1.x of lambda/N * sum = 2 * 2 * (1 - 0) / 2.
    CHECK(adj[1].x == doctest::Approx(2.0));
    CHECK(adj[0].x == doctest::Approx(0));
    CHECK(adj[1].z == doctest::Approx(-2.0));
    CHECK_THROWS_AS(lossPho({}, {}, 1), Error);
}

TEST_CASE("geometry loss measures fitted-to-tracked vertex distance") {
    GuideMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    mesh.uvs = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    mesh.triangles = {{0, 1, 2}};
    const std::vector<Vec3> offsets{Vec3(0.1, 0, 0), Vec3(), Vec3()};
    const std::vector<Vec3> tracked{Vec3(0.2, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0.3)};
    // Residuals: (-0.1, 0, 0), 0, (0, 0, -0.3); mean squared over 3 verts.
    const real expect = (0.01 + 0.09) / 3.0;
    CHECK(lossGeo(mesh, offsets, tracked, 1) == doctest::Approx(expect));
    CHECK(lossGeo(mesh, {}, tracked, 1) ==
          doctest::Approx((0.04 + 0.09) / 3.0)); // empty offsets mean zero
    // Gradient flows into the vertex-offset block.
    Frame fr = tinyFrame(1);
    const ParamLayout layout = layoutOf(fr, mesh.vertices.size());
    GradBuffer grads(layout);
    lossGeo(mesh, offsets, tracked, 1, &grads);
    // d/d offset0.x of |v0 + o0 - t0|^2 / 3 = 2 * (-0.1) / 3.
    CHECK(grads.values[layout.vertexIndex(0)] == doctest::Approx(-0.2 / 3.0));
    CHECK(grads.values[layout.vertexIndex(1)] == doctest::Approx(0));
}

TEST_CASE("volume loss sums composed scale products") {
    Frame fr = tinyFrame(2);
    fr.transforms[1].deltaS = Vec3(0.1, 0, -0.1);
    // prod0 = 0.5*0.4*0.3 = 0.06; prod1 = 0.6*0.4*0.2 = 0.048.
    const real l = lossVol(fr.transforms, real(0.5));
    CHECK(l == doctest::Approx(0.5 * (0.06 + 0.048)));
    const ParamLayout layout = layoutOf(fr, 0);
    GradBuffer grads(layout);
    lossVol(fr.transforms, real(0.5), &grads);
    // d prod1 / d ds1.x = s_y * s_z = 0.08.
    CHECK(grads.values[layout.deltaSIndex(1)] == doctest::Approx(0.5 * 0.08));
    CHECK(grads.values[layout.deltaSIndex(1) + 2] == doctest::Approx(0.5 * 0.6 * 0.4));
    CHECK(grads.values[layout.deltaTIndex(0)] == 0);
}

TEST_CASE("delta magnitude loss and its gradient") {
    Frame fr = tinyFrame(1);
    fr.transforms[0].deltaT = Vec3(0.1, -0.2, 0);
    fr.transforms[0].deltaR = Vec3(0, 0.3, 0);
    fr.transforms[0].deltaS = Vec3(0, 0, 0.05);
    const real expect = 0.01 + 0.04 + 0.09 + 0.0025;
    CHECK(lossDel(fr.transforms, 2) == doctest::Approx(2 * expect));
    const ParamLayout layout = layoutOf(fr, 0);
    GradBuffer grads(layout);
    lossDel(fr.transforms, 2, &grads);
    CHECK(grads.values[layout.deltaTIndex(0) + 1] == doctest::Approx(2 * 2 * -0.2));
    CHECK(grads.values[layout.deltaRIndex(0) + 1] == doctest::Approx(2 * 2 * 0.3));
    CHECK(grads.values[layout.deltaSIndex(0) + 2] == doctest::Approx(2 * 2 * 0.05));
}

TEST_CASE("adam first step moves by the learning rate") {
    // With bias correction, |step 1| = lr for any nonzero gradient.
    Frame fr = tinyFrame(1);
    const ParamLayout layout = layoutOf(fr, 0);
    fr.slab.payload[0] = real(0.5);
    GradBuffer grads(layout);
    grads.values[0] = real(0.37);
    AdamConfig cfg;
    cfg.lr = real(0.01);
    AdamState state(layout.total(), cfg);
    adamStep(fr, layout, grads, state);
    CHECK(fr.slab.payload[0] == doctest::Approx(0.5 - 0.01).epsilon(1e-4));
}

TEST_CASE("adam matches a scalar reference implementation over several steps") {
    Frame fr = tinyFrame(1);
    const ParamLayout layout = layoutOf(fr, 0);
    fr.slab.payload[0] = 2;
    AdamConfig cfg;
    cfg.lr = real(0.1);
    AdamState state(layout.total(), cfg);
    // Reference: minimize (x - 1)^2 by hand-stepped Adam.
    double x = 2, m = 0, v = 0;
    for (int t = 1; t <= 25; ++t) {
        const double g = 2 * (x - 1);
        GradBuffer grads(layout);
        grads.values[0] = real(2 * (fr.slab.payload[0] - 1));
        adamStep(fr, layout, grads, state);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1 - std::pow(0.9, t));
        const double vh = v / (1 - std::pow(0.999, t));
        x -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
        CHECK(fr.slab.payload[0] == doctest::Approx(x).epsilon(1e-3));
    }
    // It should be most of the way to the minimum by now.
    CHECK(std::abs(fr.slab.payload[0] - 1) < real(0.2));
}

TEST_CASE("projection keeps payload non-negative and scales above the floor") {
    Frame fr = tinyFrame(1);
    const ParamLayout layout = layoutOf(fr, 0);
    fr.slab.payload[0] = real(0.001);
    GradBuffer grads(layout);
    grads.values[0] = 100; // huge positive gradient drives the value negative
    // Likewise push the z scale far below the floor.
    grads.values[layout.deltaSIndex(0) + 2] = 1000;
    AdamConfig cfg;
    cfg.lr = real(0.5);
    AdamState state(layout.total(), cfg);
    adamStep(fr, layout, grads, state);
    CHECK(fr.slab.payload[0] == 0);
    const Vec3 s = fr.transforms[0].sBase + fr.transforms[0].deltaS;
    CHECK(s.z == doctest::Approx(kMinScale));
}

TEST_CASE("non-finite gradients abort the step") {
    Frame fr = tinyFrame(1);
    const ParamLayout layout = layoutOf(fr, 0);
    GradBuffer grads(layout);
    grads.values[3] = std::numeric_limits<real>::quiet_NaN();
    AdamState state(layout.total());
    try {
        adamStep(fr, layout, grads, state);
        FAIL("expected throw");
    } catch (const Error &e) {
        CHECK(e.category() == ErrorCategory::Numeric);
    }
}

TEST_CASE("flat parameter indexing round-trips every block") {
    Frame fr = tinyFrame(2);
    const ParamLayout layout = layoutOf(fr, 3);
    CHECK(layout.total() == 2 * 4 * 8 + 2 * 9 + 9);
    setParam(fr, layout, 5, real(0.25));
    CHECK(getParam(fr, layout, 5) == real(0.25));
    setParam(fr, layout, layout.deltaRIndex(1) + 2, real(-0.5));
    CHECK(fr.transforms[1].deltaR.z == real(-0.5));
    setParam(fr, layout, layout.vertexIndex(2) + 1, real(0.125));
    CHECK(getParam(fr, layout, layout.vertexIndex(2) + 1) == real(0.125));
    for (size_t i = 0; i < layout.total(); ++i) {
        const real v = getParam(fr, layout, i);
        setParam(fr, layout, i, v + 1);
        CHECK(getParam(fr, layout, i) == v + 1);
        setParam(fr, layout, i, v);
    }
}
