// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "volprim/errors.h"
#include "volprim/mesh.h"

using namespace volprim;

namespace {

// Unit quad in the xy-plane, uv equal to position.
GuideMesh unitQuad() {
    GuideMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
    mesh.uvs = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
    return mesh;
}

// Quad scaled by 2 in x and tilted out of plane.
GuideMesh stretchedQuad() {
    GuideMesh mesh = unitQuad();
    for (Vec3 &v : mesh.vertices) v.x *= 2;
    return mesh;
}

} // namespace

TEST_CASE("tangent frame on a flat quad") {
    const GuideMesh mesh = unitQuad();
    const TangentFrame f = tangentFrame(mesh, Vec2(0.25, 0.25));
    CHECK(length(f.point - Vec3(0.25, 0.25, 0)) < real(1e-5));
    // Tangent follows du, normal follows the geometric normal.
    CHECK(length(f.rotation.col(0) - Vec3(1, 0, 0)) < real(1e-5));
    CHECK(length(f.rotation.col(1) - Vec3(0, 1, 0)) < real(1e-5));
    CHECK(length(f.rotation.col(2) - Vec3(0, 0, 1)) < real(1e-5));
    CHECK((f.rotation.transpose() * f.rotation).maxAbsDiff(Mat3::identity()) < real(1e-5));
}

TEST_CASE("tangent frame stays orthonormal under anisotropic stretch") {
    const GuideMesh mesh = stretchedQuad();
    const TangentFrame f = tangentFrame(mesh, Vec2(0.3, 0.6));
    CHECK((f.rotation.transpose() * f.rotation).maxAbsDiff(Mat3::identity()) < real(1e-5));
    CHECK(f.rotation.det() == doctest::Approx(1).epsilon(1e-5));
    CHECK(length(f.point - Vec3(0.6, 0.6, 0)) < real(1e-5));
}

TEST_CASE("uv queries off the chart throw Usage") {
    const GuideMesh mesh = unitQuad();
    CHECK_THROWS_AS(tangentFrame(mesh, Vec2(1.5, 0.5)), Error);
    CHECK(!tryTangentFrame(mesh, Vec2(-0.2, 0.5)).has_value());
    CHECK(tryTangentFrame(mesh, Vec2(0.5, 0.5)).has_value());
}

TEST_CASE("uv scale follows the surface stretch") {
    // On the stretched quad dx/du has length 2 and dx/dv length 1, so a grid
    // cell of uv-width 0.25 spans 0.5 x 0.25 in world units.
    const GuideMesh mesh = stretchedQuad();
    const Vec3 s = uvScaleGradient(mesh, Vec2(0.4, 0.4), real(0.25));
    CHECK(s.x == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(s.y == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(s.z == doctest::Approx(std::sqrt(0.5 * 0.25)).epsilon(1e-4));
}

TEST_CASE("obj round-trip") {
    const GuideMesh mesh = stretchedQuad();
    const std::string path = "test_mesh_tmp.obj";
    saveObj(mesh, path);
    const GuideMesh back = loadObj(path);
    std::remove(path.c_str());
    REQUIRE(back.vertices.size() == 4);
    REQUIRE(back.triangles.size() == 2);
    for (size_t i = 0; i < 4; ++i) {
        CHECK(length(back.vertices[i] - mesh.vertices[i]) < real(1e-5));
        CHECK(std::abs(back.uvs[i].x - mesh.uvs[i].x) < real(1e-5));
    }
    CHECK(back.triangles[1] == mesh.triangles[1]);
}

TEST_CASE("quads in obj files are fan-triangulated") {
    const std::string path = "test_mesh_quad.obj";
    {
        std::ofstream out(path);
        out << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n";
        out << "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n";
        out << "f 1/1 2/2 3/3 4/4\n";
    }
    const GuideMesh mesh = loadObj(path);
    std::remove(path.c_str());
    REQUIRE(mesh.triangles.size() == 2);
    CHECK(mesh.triangles[0] == std::array<int, 3>{0, 1, 2});
    CHECK(mesh.triangles[1] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("faces without uv indices are rejected") {
    const std::string path = "test_mesh_bad.obj";
    {
        std::ofstream out(path);
        out << "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nf 1 2 3\n";
    }
    CHECK_THROWS_AS(loadObj(path), Error);
    std::remove(path.c_str());
}

TEST_CASE("out-of-range indices fail validation") {
    GuideMesh mesh = unitQuad();
    mesh.triangles.push_back({0, 1, 9});
    try {
        mesh.validate();
        FAIL("expected throw");
    } catch (const Error &e) {
        CHECK(e.category() == ErrorCategory::Format);
    }
}
