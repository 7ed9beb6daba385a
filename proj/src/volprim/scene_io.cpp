// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "scene_io.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "errors.h"

namespace volprim {

namespace fs = std::filesystem;
using nlohmann::json;

static constexpr char kSlabMagic[4] = {'V', 'P', 'S', 'L'};
static constexpr uint32_t kSlabVersion = 1;
static constexpr int kSceneVersion = 1;

std::string resolveRelative(const std::string &docPath, const std::string &ref) {
    const fs::path p(ref);
    if (p.is_absolute()) return ref;
    return (fs::path(docPath).parent_path() / p).string();
}

void saveSlab(const PrimitiveSlab &slab, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Io, "cannot write slab: " + path);
    out.write(kSlabMagic, 4);
    const uint32_t header[3] = {kSlabVersion, uint32_t(slab.numPrimitives),
                                uint32_t(slab.voxelsPerAxis)};
    out.write(reinterpret_cast<const char *>(header), sizeof(header));
    for (real v : slab.payload) {
        const float f = float(v);
        out.write(reinterpret_cast<const char *>(&f), 4);
    }
    if (!out) throw Error(ErrorCategory::Io, "short slab write: " + path);
}

PrimitiveSlab loadSlab(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCategory::Io, "cannot open slab: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kSlabMagic, 4) != 0)
        throw Error(ErrorCategory::Format, "bad slab magic: " + path);
    uint32_t header[3];
    in.read(reinterpret_cast<char *>(header), sizeof(header));
    if (!in) throw Error(ErrorCategory::Format, "truncated slab header: " + path);
    if (header[0] != kSlabVersion)
        throw Error(ErrorCategory::Version, "unsupported slab version " + std::to_string(header[0]));
    if (header[1] == 0 || header[2] == 0 || header[1] > (1u << 20) || header[2] > 512)
        throw Error(ErrorCategory::Format, "implausible slab header: " + path);
    PrimitiveSlab slab;
    slab.resize(int(header[1]), int(header[2]));
    for (real &v : slab.payload) {
        float f;
        in.read(reinterpret_cast<char *>(&f), 4);
        v = real(f);
    }
    if (!in) throw Error(ErrorCategory::Format, "truncated slab payload: " + path);
    return slab;
}

static json vecToJson(const Vec3 &v) { return json::array({double(v.x), double(v.y), double(v.z)}); }

static Vec3 vecFromJson(const json &j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCategory::Format, "expected 3-vector");
    return {real(j[0].get<double>()), real(j[1].get<double>()), real(j[2].get<double>())};
}

static json matToJson(const Mat3 &m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.push_back(double(m(r, c)));
    return a;
}

static Mat3 matFromJson(const json &j) {
    if (!j.is_array() || j.size() != 9) throw Error(ErrorCategory::Format, "expected 3x3 matrix");
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = real(j[r * 3 + c].get<double>());
    return m;
}

SceneFile loadScene(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open scene: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw Error(ErrorCategory::Format, "scene JSON parse error: " + std::string(e.what()));
    }
    if (doc.value("version", -1) != kSceneVersion)
        throw Error(ErrorCategory::Version, "unsupported scene version");

    SceneFile file;
    file.meshPath = resolveRelative(path, doc.at("mesh").get<std::string>());
    file.camerasPath = resolveRelative(path, doc.at("cameras").get<std::string>());
    file.scene.mesh = loadObj(file.meshPath);

    const auto &jw = doc.at("window");
    file.scene.window.alpha = real(jw.at("alpha").get<double>());
    file.scene.window.beta = jw.at("beta").get<int>();
    if (file.scene.window.alpha < 0 || file.scene.window.beta <= 0 ||
        file.scene.window.beta % 2 != 0)
        throw Error(ErrorCategory::Format, "window alpha must be >= 0 and beta a positive even int");

    const auto &jm = doc.at("march");
    file.scene.march.stepSize = real(jm.at("stepsize").get<double>());
    file.scene.march.earlyEps = real(jm.at("early_eps").get<double>());
    file.scene.march.jitter = jm.value("jitter", false);
    if (file.scene.march.stepSize <= 0 || file.scene.march.earlyEps <= 0 ||
        file.scene.march.earlyEps >= 1)
        throw Error(ErrorCategory::Format, "march config out of range");

    for (const auto &jf : doc.at("frames")) {
        Frame frame;
        const std::string slabRef = jf.at("slab").get<std::string>();
        const std::string slabPath = resolveRelative(path, slabRef);
        frame.slab = loadSlab(slabPath);
        file.slabPaths.push_back(slabPath);
        for (const auto &jx : jf.at("transforms")) {
            PrimitiveTransform xf;
            xf.tBase = vecFromJson(jx.at("t_base"));
            xf.rBase = matFromJson(jx.at("r_base"));
            xf.sBase = vecFromJson(jx.at("s_base"));
            xf.deltaT = vecFromJson(jx.at("dt"));
            xf.deltaR = vecFromJson(jx.at("dr"));
            xf.deltaS = vecFromJson(jx.at("ds"));
            frame.transforms.push_back(xf);
        }
        if (int(frame.transforms.size()) != frame.slab.numPrimitives)
            throw Error(ErrorCategory::Format, "transform count does not match slab");
        if (jf.contains("vertex_offsets"))
            for (const auto &jv : jf.at("vertex_offsets"))
                frame.vertexOffsets.push_back(vecFromJson(jv));
        if (!frame.vertexOffsets.empty() &&
            frame.vertexOffsets.size() != file.scene.mesh.vertices.size())
            throw Error(ErrorCategory::Format, "vertex offset count mismatch");
        file.scene.frames.push_back(std::move(frame));
    }
    return file;
}

void saveScene(const SceneFile &file, const std::string &path) {
    json doc;
    doc["version"] = kSceneVersion;
    const fs::path base = fs::path(path).parent_path();
    doc["mesh"] = fs::relative(file.meshPath, base).string();
    doc["cameras"] = fs::relative(file.camerasPath, base).string();
    doc["window"] = {{"alpha", double(file.scene.window.alpha)}, {"beta", file.scene.window.beta}};
    doc["march"] = {{"stepsize", double(file.scene.march.stepSize)},
                    {"early_eps", double(file.scene.march.earlyEps)},
                    {"jitter", file.scene.march.jitter}};
    doc["frames"] = json::array();
    for (size_t f = 0; f < file.scene.frames.size(); ++f) {
        const Frame &frame = file.scene.frames[f];
        json jf;
        std::string slabPath;
        if (f < file.slabPaths.size() && !file.slabPaths[f].empty())
            slabPath = file.slabPaths[f];
        else
            slabPath = (base / (fs::path(path).stem().string() + "_frame" + std::to_string(f) +
                                ".vpsl"))
                           .string();
        saveSlab(frame.slab, slabPath);
        jf["slab"] = fs::relative(slabPath, base).string();
        jf["transforms"] = json::array();
        for (const auto &xf : frame.transforms) {
            json jx;
            jx["t_base"] = vecToJson(xf.tBase);
            jx["r_base"] = matToJson(xf.rBase);
            jx["s_base"] = vecToJson(xf.sBase);
            jx["dt"] = vecToJson(xf.deltaT);
            jx["dr"] = vecToJson(xf.deltaR);
            jx["ds"] = vecToJson(xf.deltaS);
            jf["transforms"].push_back(jx);
        }
        if (!frame.vertexOffsets.empty()) {
            jf["vertex_offsets"] = json::array();
            for (const Vec3 &v : frame.vertexOffsets) jf["vertex_offsets"].push_back(vecToJson(v));
        }
        doc["frames"].push_back(jf);
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::Io, "cannot write scene: " + path);
    out << doc.dump(2) << "\n";
}

Dataset loadDataset(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open dataset: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw Error(ErrorCategory::Format, "dataset JSON parse error: " + std::string(e.what()));
    }
    Dataset ds;
    ds.camerasPath = resolveRelative(path, doc.at("cameras").get<std::string>());
    for (const auto &jb : doc.at("backgrounds"))
        ds.backgroundPaths.push_back(resolveRelative(path, jb.get<std::string>()));
    for (const auto &jm : doc.at("tracked_meshes"))
        ds.trackedMeshPaths.push_back(resolveRelative(path, jm.get<std::string>()));
    for (const auto &jf : doc.at("frames")) {
        std::vector<DatasetEntry> row;
        for (const auto &je : jf) {
            DatasetEntry e;
            if (!je.is_null()) {
                e.present = true;
                e.targetRaw = resolveRelative(path, je.at("target").get<std::string>());
                if (je.contains("preview"))
                    e.targetPng = resolveRelative(path, je.at("preview").get<std::string>());
            }
            row.push_back(e);
        }
        ds.entries.push_back(row);
    }
    if (doc.contains("train_cameras"))
        for (const auto &j : doc.at("train_cameras")) ds.trainCameras.push_back(j.get<int>());
    if (doc.contains("heldout_cameras"))
        for (const auto &j : doc.at("heldout_cameras")) ds.heldoutCameras.push_back(j.get<int>());
    return ds;
}

void saveDataset(const Dataset &ds, const std::string &path) {
    const fs::path base = fs::path(path).parent_path();
    auto rel = [&](const std::string &p) { return fs::relative(p, base).string(); };
    json doc;
    doc["cameras"] = rel(ds.camerasPath);
    doc["backgrounds"] = json::array();
    for (const auto &b : ds.backgroundPaths) doc["backgrounds"].push_back(rel(b));
    doc["tracked_meshes"] = json::array();
    for (const auto &m : ds.trackedMeshPaths) doc["tracked_meshes"].push_back(rel(m));
    doc["frames"] = json::array();
    for (const auto &row : ds.entries) {
        json jf = json::array();
        for (const auto &e : row) {
            if (!e.present) {
                jf.push_back(nullptr);
                continue;
            }
            json je;
            je["target"] = rel(e.targetRaw);
            if (!e.targetPng.empty()) je["preview"] = rel(e.targetPng);
            jf.push_back(je);
        }
        doc["frames"].push_back(jf);
    }
    doc["train_cameras"] = ds.trainCameras;
    doc["heldout_cameras"] = ds.heldoutCameras;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::Io, "cannot write dataset: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace volprim
