// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "camera.h"

#include <fstream>

#include <json.hpp>

#include "errors.h"

namespace volprim {

Ray generateRay(const Camera &cam, const Vec2 &pixel) {
    if (pixel.x < 0 || pixel.y < 0 || pixel.x > real(cam.width) || pixel.y > real(cam.height))
        throw Error(ErrorCategory::Usage, "pixel outside image bounds");
    const Mat3 kinv = cam.intrinsics.inverse();
    const Vec3 dirCam = kinv * Vec3(pixel.x, pixel.y, 1);
    Ray ray;
    ray.origin = cam.center();
    ray.direction = normalize(cam.rotation.matrix.transpose() * dirCam);
    return ray;
}

Vec2 project(const Camera &cam, const Vec3 &world) {
    const Vec3 pc = cam.rotation.matrix * world + cam.translation;
    const Vec3 hp = cam.intrinsics * pc;
    return {hp.x / hp.z, hp.y / hp.z};
}

static Vec3 vec3FromJson(const nlohmann::json &j) {
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCategory::Format, "expected 3-element array");
    return {real(j[0].get<double>()), real(j[1].get<double>()), real(j[2].get<double>())};
}

std::vector<Camera> loadCameras(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open camera file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCategory::Format, "camera JSON parse error: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw Error(ErrorCategory::Format, "camera file must be a JSON array");
    std::vector<Camera> cams;
    for (const auto &jc : doc) {
        Camera cam;
        const auto &k = jc.at("K");
        if (!k.is_array() || k.size() != 9)
            throw Error(ErrorCategory::Format, "K must have 9 entries");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) cam.intrinsics(r, c) = real(k[r * 3 + c].get<double>());
        if (cam.intrinsics(0, 0) <= 0 || cam.intrinsics(1, 1) <= 0 ||
            cam.intrinsics(1, 0) != 0 || cam.intrinsics(2, 0) != 0 || cam.intrinsics(2, 1) != 0)
            throw Error(ErrorCategory::Format, "K must be upper-triangular with positive focals");
        cam.rotation = rotationFromAxisAngle(vec3FromJson(jc.at("R_axis_angle")));
        cam.translation = vec3FromJson(jc.at("t"));
        cam.width = jc.at("width").get<int>();
        cam.height = jc.at("height").get<int>();
        if (cam.width <= 0 || cam.height <= 0)
            throw Error(ErrorCategory::Format, "image size must be positive");
        cams.push_back(cam);
    }
    return cams;
}

void saveCameras(const std::vector<Camera> &cams, const std::string &path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const Camera &cam : cams) {
        nlohmann::json jc;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) jc["K"].push_back(double(cam.intrinsics(r, c)));
        jc["R_axis_angle"] = {double(cam.rotation.axisAngle.x), double(cam.rotation.axisAngle.y),
                              double(cam.rotation.axisAngle.z)};
        jc["t"] = {double(cam.translation.x), double(cam.translation.y), double(cam.translation.z)};
        jc["width"] = cam.width;
        jc["height"] = cam.height;
        doc.push_back(jc);
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::Io, "cannot write camera file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace volprim
