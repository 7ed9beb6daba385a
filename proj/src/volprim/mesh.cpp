// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "mesh.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.h"

namespace volprim {

static real uvTriangleArea2(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

void GuideMesh::validate() const {
    if (uvs.size() != vertices.size())
        throw Error(ErrorCategory::Format, "mesh needs one uv per vertex");
    const int n = int(vertices.size());
    for (const auto &tri : triangles) {
        for (int idx : tri)
            if (idx < 0 || idx >= n)
                throw Error(ErrorCategory::Format, "triangle index out of range");
        if (uvTriangleArea2(uvs[tri[0]], uvs[tri[1]], uvs[tri[2]]) == 0)
            throw Error(ErrorCategory::Format, "triangle with zero UV area");
    }
}

namespace {

struct UvHit {
    int triangle;
    Vec3 bary;
};

std::optional<UvHit> findUvTriangle(const GuideMesh &mesh, const Vec2 &uv) {
    constexpr real eps = real(1e-7);
    for (int t = 0; t < int(mesh.triangles.size()); ++t) {
        const auto &tri = mesh.triangles[t];
        const Vec2 &a = mesh.uvs[tri[0]];
        const Vec2 &b = mesh.uvs[tri[1]];
        const Vec2 &c = mesh.uvs[tri[2]];
        const real area = uvTriangleArea2(a, b, c);
        if (area == 0) continue;
        const real w0 = uvTriangleArea2(uv, b, c) / area;
        const real w1 = uvTriangleArea2(a, uv, c) / area;
        const real w2 = 1 - w0 - w1;
        if (w0 >= -eps && w1 >= -eps && w2 >= -eps) return UvHit{t, Vec3(w0, w1, w2)};
    }
    return std::nullopt;
}

// dx/du and dx/dv of the triangle's affine UV parameterization.
void uvJacobian(const GuideMesh &mesh, int t, Vec3 &dxdu, Vec3 &dxdv) {
    const auto &tri = mesh.triangles[t];
    const Vec3 e1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Vec3 e2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    const Vec2 duv1 = mesh.uvs[tri[1]] - mesh.uvs[tri[0]];
    const Vec2 duv2 = mesh.uvs[tri[2]] - mesh.uvs[tri[0]];
    const real det = duv1.x * duv2.y - duv1.y * duv2.x;
    if (det == 0) throw Error(ErrorCategory::Format, "degenerate UV Jacobian");
    const real inv = 1 / det;
    dxdu = (e1 * duv2.y - e2 * duv1.y) * inv;
    dxdv = (e2 * duv1.x - e1 * duv2.x) * inv;
}

} // namespace

std::optional<TangentFrame> tryTangentFrame(const GuideMesh &mesh, const Vec2 &uv) {
    const auto hit = findUvTriangle(mesh, uv);
    if (!hit) return std::nullopt;
    const auto &tri = mesh.triangles[hit->triangle];
    TangentFrame frame;
    frame.triangle = hit->triangle;
    frame.point = mesh.vertices[tri[0]] * hit->bary.x + mesh.vertices[tri[1]] * hit->bary.y +
                  mesh.vertices[tri[2]] * hit->bary.z;

    Vec3 dxdu, dxdv;
    uvJacobian(mesh, hit->triangle, dxdu, dxdv);
    const real lu = length(dxdu);
    if (lu == 0) throw Error(ErrorCategory::Format, "degenerate tangent");
    const Vec3 tangent = dxdu / lu;
    Vec3 bit = dxdv - tangent * dot(dxdv, tangent);
    const real lb = length(bit);
    if (lb == 0) throw Error(ErrorCategory::Format, "degenerate bitangent");
    bit = bit / lb;
    Vec3 normal = cross(tangent, bit);
    const Vec3 geom = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                            mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    if (dot(normal, geom) < 0) {
        bit = -bit;
        normal = -normal;
    }
    frame.rotation = Mat3::fromColumns(tangent, bit, normal);
    return frame;
}

TangentFrame tangentFrame(const GuideMesh &mesh, const Vec2 &uv) {
    auto frame = tryTangentFrame(mesh, uv);
    if (!frame) throw Error(ErrorCategory::Usage, "uv outside all triangle footprints");
    return *frame;
}

Vec3 uvScaleGradient(const GuideMesh &mesh, const Vec2 &uv, real gridSpacing) {
    const auto hit = findUvTriangle(mesh, uv);
    if (!hit) throw Error(ErrorCategory::Usage, "uv outside all triangle footprints");
    Vec3 dxdu, dxdv;
    uvJacobian(mesh, hit->triangle, dxdu, dxdv);
    const real su = length(dxdu) * gridSpacing;
    const real sv = length(dxdv) * gridSpacing;
    if (su == 0 || sv == 0) throw Error(ErrorCategory::Format, "degenerate UV Jacobian");
    return {su, sv, std::sqrt(su * sv)};
}

GuideMesh loadObj(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open mesh: " + path);
    GuideMesh mesh;
    std::vector<Vec2> vts;
    std::vector<char> uvSet;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ss >> x >> y >> z))
                throw Error(ErrorCategory::Format, "bad v record at line " + std::to_string(lineNo));
            mesh.vertices.push_back(Vec3(real(x), real(y), real(z)));
        } else if (tag == "vt") {
            double u, v;
            if (!(ss >> u >> v))
                throw Error(ErrorCategory::Format, "bad vt record at line " + std::to_string(lineNo));
            vts.push_back(Vec2(real(u), real(v)));
        } else if (tag == "f") {
            std::vector<int> vIdx;
            std::string ref;
            while (ss >> ref) {
                int vi = 0, vti = 0;
                if (std::sscanf(ref.c_str(), "%d/%d", &vi, &vti) != 2)
                    throw Error(ErrorCategory::Format,
                                "f record must use v/vt form at line " + std::to_string(lineNo));
                if (vi < 1 || vi > int(mesh.vertices.size()) || vti < 1 || vti > int(vts.size()))
                    throw Error(ErrorCategory::Format,
                                "face index out of range at line " + std::to_string(lineNo));
                mesh.uvs.resize(mesh.vertices.size());
                uvSet.resize(mesh.vertices.size(), 0);
                const Vec2 &uv = vts[vti - 1];
                if (uvSet[vi - 1] &&
                    (mesh.uvs[vi - 1].x != uv.x || mesh.uvs[vi - 1].y != uv.y))
                    throw Error(ErrorCategory::Format,
                                "vertex referenced with conflicting uvs (per-vertex UV required)");
                mesh.uvs[vi - 1] = uv;
                uvSet[vi - 1] = 1;
                vIdx.push_back(vi - 1);
            }
            if (vIdx.size() < 3)
                throw Error(ErrorCategory::Format, "face with fewer than 3 vertices");
            for (size_t i = 2; i < vIdx.size(); ++i)
                mesh.triangles.push_back({vIdx[0], vIdx[i - 1], vIdx[i]});
        }
        // other records ignored
    }
    mesh.uvs.resize(mesh.vertices.size());
    mesh.validate();
    return mesh;
}

void saveObj(const GuideMesh &mesh, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::Io, "cannot write mesh: " + path);
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3 &v = mesh.vertices[i];
        out << "v " << v.x << " " << v.y << " " << v.z << "\n";
        out << "vt " << mesh.uvs[i].x << " " << mesh.uvs[i].y << "\n";
    }
    for (const auto &tri : mesh.triangles)
        out << "f " << tri[0] + 1 << "/" << tri[0] + 1 << " " << tri[1] + 1 << "/" << tri[1] + 1
            << " " << tri[2] + 1 << "/" << tri[2] + 1 << "\n";
}

} // namespace volprim
