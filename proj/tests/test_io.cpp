// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "volprim/errors.h"
#include "volprim/scene_io.h"
#include "volprim/synthetic.h"

using namespace volprim;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "volprim_io_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string &name) const { return (path / name).string(); }
};

void patchByte(const std::string &path, size_t offset, char value) {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(std::streamoff(offset));
    f.write(&value, 1);
}

ErrorCategory categoryOf(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.category();
    }
    FAIL("expected throw");
    return ErrorCategory::Usage;
}

} // namespace

TEST_CASE("raw image round-trip preserves every sample") {
    TempDir dir;
    Image img(5, 3, 3);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = real(i) * real(0.125);
    const std::string path = dir.file("img.vpim");
    saveRawImage(img, path);
    const Image back = loadRawImage(path);
    CHECK(back.width == 5);
    CHECK(back.height == 3);
    CHECK(back.channels == 3);
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-6));
}

TEST_CASE("raw image errors carry the right category") {
    TempDir dir;
    CHECK(categoryOf([&] { loadRawImage(dir.file("missing.vpim")); }) == ErrorCategory::Io);
    Image img(2, 2, 1);
    const std::string path = dir.file("img.vpim");
    saveRawImage(img, path);
    patchByte(path, 0, 'X'); // corrupt the magic
    CHECK(categoryOf([&] { loadRawImage(path); }) == ErrorCategory::Format);
    saveRawImage(img, path);
    patchByte(path, 4, 9); // bump the version field
    CHECK(categoryOf([&] { loadRawImage(path); }) == ErrorCategory::Version);
}

TEST_CASE("png output starts with a valid signature and chunk layout") {
    TempDir dir;
    Image img(4, 2, 3);
    img.at(0, 0, 0) = 1;
    img.at(3, 1, 2) = real(0.5);
    const std::string path = dir.file("img.png");
    savePng(img, path);
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8];
    in.read(reinterpret_cast<char *>(sig), 8);
    const unsigned char expect[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    for (int i = 0; i < 8; ++i) CHECK(sig[i] == expect[i]);
    char lenType[8];
    in.read(lenType, 8);
    CHECK(std::string(lenType + 4, 4) == "IHDR");
    // IHDR payload: width and height as big-endian u32.
    unsigned char wh[8];
    in.read(reinterpret_cast<char *>(wh), 8);
    CHECK(((wh[0] << 24) | (wh[1] << 16) | (wh[2] << 8) | wh[3]) == 4);
    CHECK(((wh[4] << 24) | (wh[5] << 16) | (wh[6] << 8) | wh[7]) == 2);
}

TEST_CASE("slab blob round-trip") {
    TempDir dir;
    PrimitiveSlab slab;
    slab.resize(3, 4);
    for (size_t i = 0; i < slab.payload.size(); ++i) slab.payload[i] = real(i % 251) * real(0.5);
    const std::string path = dir.file("payload.vpsl");
    saveSlab(slab, path);
    const PrimitiveSlab back = loadSlab(path);
    CHECK(back.numPrimitives == 3);
    CHECK(back.voxelsPerAxis == 4);
    REQUIRE(back.payload.size() == slab.payload.size());
    for (size_t i = 0; i < slab.payload.size(); ++i)
        CHECK(back.payload[i] == doctest::Approx(slab.payload[i]));
}

TEST_CASE("slab errors distinguish io, format, and version") {
    TempDir dir;
    CHECK(categoryOf([&] { loadSlab(dir.file("missing.vpsl")); }) == ErrorCategory::Io);
    PrimitiveSlab slab;
    slab.resize(1, 2);
    const std::string path = dir.file("payload.vpsl");
    saveSlab(slab, path);
    patchByte(path, 1, 'x');
    CHECK(categoryOf([&] { loadSlab(path); }) == ErrorCategory::Format);
    saveSlab(slab, path);
    patchByte(path, 4, 3); // version -> 3
    CHECK(categoryOf([&] { loadSlab(path); }) == ErrorCategory::Version);
    saveSlab(slab, path);
    fs::resize_file(path, 20); // cut the payload short
    CHECK(categoryOf([&] { loadSlab(path); }) == ErrorCategory::Format);
}

TEST_CASE("scene json round-trips through save and load") {
    TempDir dir;
    const SyntheticConfig cfg{4, 4, 3, 24, 5, real(0.01), 8, 0, dir.file("data")};
    const SyntheticResult made = makeSynthetic(cfg);
    const SceneFile a = loadScene(made.gtScenePath);
    const std::string copyPath = dir.file("data/copy.json");
    saveScene(a, copyPath);
    const SceneFile b = loadScene(copyPath);
    REQUIRE(a.scene.frames.size() == b.scene.frames.size());
    const Frame &fa = a.scene.frames[0];
    const Frame &fb = b.scene.frames[0];
    REQUIRE(fa.transforms.size() == fb.transforms.size());
    for (size_t k = 0; k < fa.transforms.size(); ++k) {
        CHECK(length(fa.transforms[k].tBase - fb.transforms[k].tBase) < real(1e-6));
        CHECK(fa.transforms[k].rBase.maxAbsDiff(fb.transforms[k].rBase) < real(1e-6));
        CHECK(length(fa.transforms[k].deltaS - fb.transforms[k].deltaS) < real(1e-6));
    }
    CHECK(fa.slab.payload == fb.slab.payload);
    CHECK(a.scene.window.alpha == b.scene.window.alpha);
    CHECK(a.scene.march.stepSize == b.scene.march.stepSize);
    CHECK(a.scene.mesh.vertices.size() == b.scene.mesh.vertices.size());
}

TEST_CASE("scene loader rejects foreign versions and malformed documents") {
    TempDir dir;
    const std::string path = dir.file("scene.json");
    {
        std::ofstream out(path);
        out << "{\"version\": 99}";
    }
    CHECK(categoryOf([&] { loadScene(path); }) == ErrorCategory::Version);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK(categoryOf([&] { loadScene(path); }) == ErrorCategory::Format);
    CHECK(categoryOf([&] { loadScene(dir.file("absent.json")); }) == ErrorCategory::Io);
}

TEST_CASE("dataset json round-trips including holes") {
    TempDir dir;
    fs::create_directories(dir.path / "ds");
    Dataset ds;
    ds.camerasPath = dir.file("ds/cams.json");
    ds.backgroundPaths = {dir.file("ds/bg0.vpim"), dir.file("ds/bg1.vpim")};
    ds.trackedMeshPaths = {dir.file("ds/mesh0.obj")};
    DatasetEntry e;
    e.present = true;
    e.targetRaw = dir.file("ds/t00.vpim");
    ds.entries = {{e, DatasetEntry{}}}; // camera 1 is a hole
    ds.trainCameras = {0};
    ds.heldoutCameras = {1};
    const std::string path = dir.file("ds/dataset.json");
    saveDataset(ds, path);
    const Dataset back = loadDataset(path);
    REQUIRE(back.entries.size() == 1);
    REQUIRE(back.entries[0].size() == 2);
    CHECK(back.entries[0][0].present);
    CHECK(!back.entries[0][1].present);
    CHECK(fs::path(back.entries[0][0].targetRaw).filename() == "t00.vpim");
    CHECK(back.trainCameras == std::vector<int>{0});
    CHECK(back.heldoutCameras == std::vector<int>{1});
}

TEST_CASE("relative path resolution is anchored at the document") {
    const std::string doc = "/a/b/doc.json";
    CHECK(resolveRelative(doc, "mesh.obj") == "/a/b/mesh.obj");
    CHECK(resolveRelative(doc, "sub/x.bin") == "/a/b/sub/x.bin");
    CHECK(resolveRelative(doc, "/abs/x.bin") == "/abs/x.bin");
}
