// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "synthetic.h"

#include <filesystem>
#include <random>

#include "errors.h"

namespace volprim {

namespace fs = std::filesystem;

Camera lookAtCamera(const Vec3 &position, const Vec3 &target, const Vec3 &up, real focalPx,
                    int width, int height) {
    const Vec3 forward = normalize(target - position);
    Vec3 right = cross(forward, up);
    if (lengthSq(right) < real(1e-12)) right = cross(forward, Vec3(0, 1, 0));
    right = normalize(right);
    const Vec3 down = cross(forward, right);
    // Rows of R are the camera axes expressed in world coordinates.
    Mat3 r = Mat3::fromColumns(right, down, forward).transpose();
    Camera cam;
    cam.rotation.matrix = r;
    cam.rotation.axisAngle = axisAngleFromMatrix(r);
    // Re-derive the matrix from the stored axis-angle so serialization is exact.
    cam.rotation = rotationFromAxisAngle(cam.rotation.axisAngle);
    cam.translation = -(cam.rotation.matrix * position);
    cam.intrinsics = Mat3::identity();
    cam.intrinsics(0, 0) = focalPx;
    cam.intrinsics(1, 1) = focalPx;
    cam.intrinsics(0, 2) = real(width) / 2;
    cam.intrinsics(1, 2) = real(height) / 2;
    cam.width = width;
    cam.height = height;
    return cam;
}

// 3x3-vertex quad patch in the xy-plane spanning [-0.5, 0.5]^2, uv = p + 0.5.
static GuideMesh makeQuadMesh() {
    GuideMesh mesh;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const real u = real(i) / 2, v = real(j) / 2;
            mesh.vertices.push_back(Vec3(u - real(0.5), v - real(0.5), 0));
            mesh.uvs.push_back(Vec2(u, v));
        }
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            const int a = j * 3 + i, b = a + 1, c = a + 3, d = a + 4;
            mesh.triangles.push_back({a, b, d});
            mesh.triangles.push_back({a, d, c});
        }
    return mesh;
}

SyntheticResult makeSynthetic(const SyntheticConfig &cfg) {
    if (cfg.nCameras < 2) throw Error(ErrorCategory::Usage, "need at least 2 cameras");
    fs::create_directories(cfg.outDir);
    const fs::path dir(cfg.outDir);

    const GuideMesh mesh = makeQuadMesh();
    const std::string meshPath = (dir / "mesh.obj").string();
    saveObj(mesh, meshPath);

    // Ground-truth scene.
    Scene gt;
    gt.mesh = mesh;
    gt.window = WindowParams{8, 8};
    gt.march.stepSize = cfg.stepSize;
    gt.march.earlyEps = real(0.01);
    Frame gtFrame;
    gtFrame.transforms = initFromMesh(mesh, cfg.nPrim);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto &xf : gtFrame.transforms) {
        // Flatten along the normal and perturb orientation per primitive.
        // Varying the amounts keeps primitive faces from being coplanar, which
        // would put ray entry points on non-generic min-of-entries ties.
        xf.deltaS = Vec3(0, 0, -xf.sBase.z * real(0.4 + 0.2 * std::abs(uni(rng))));
        xf.deltaR = Vec3(real(uni(rng)), real(uni(rng)), real(uni(rng))) * real(0.12);
        if (cfg.misalignment > 0) {
            const Vec3 slide(real(uni(rng)) * cfg.misalignment * xf.sBase.x,
                             real(uni(rng)) * cfg.misalignment * xf.sBase.y,
                             real(std::abs(uni(rng))) * cfg.misalignment * xf.sBase.z);
            xf.deltaT = compose(xf).rot * slide;
        }
    }
    const int nPrim = int(gtFrame.transforms.size());
    gtFrame.slab.resize(nPrim, cfg.m);
    const double phase[4] = {uni(rng) * 3.1416, uni(rng) * 3.1416, uni(rng) * 3.1416,
                             uni(rng) * 3.1416};
    const std::vector<AffineXf> xfs = gtFrame.composed();
    for (int k = 0; k < nPrim; ++k)
        for (int z = 0; z < cfg.m; ++z)
            for (int y = 0; y < cfg.m; ++y)
                for (int x = 0; x < cfg.m; ++x) {
                    const Vec3 pm(-1 + real(2 * x + 1) / cfg.m, -1 + real(2 * y + 1) / cfg.m,
                                  -1 + real(2 * z + 1) / cfg.m);
                    const Vec3 pw = xfs[k].toWorld(pm);
                    // Smooth world-space texture so neighbours stay coherent.
                    for (int c = 0; c < 3; ++c) {
                        const double v =
                            0.5 + 0.35 * std::sin(7.0 * pw.x + 5.0 * pw.y * (c + 1) +
                                                  4.0 * pw.z + phase[c]) +
                            0.15 * std::cos(11.0 * pw.y - 3.0 * pw.x * (c + 1));
                        gtFrame.slab.payload[gtFrame.slab.index(k, c, z, y, x)] =
                            real(clamp(real(v), 0, 1));
                    }
                    const double s =
                        0.5 + 0.5 * std::sin(6.0 * pw.x + 9.0 * pw.y + 5.0 * pw.z + phase[3]);
                    gtFrame.slab.payload[gtFrame.slab.index(k, 3, z, y, x)] =
                        cfg.sigmaScale * real(0.25 + 0.75 * s);
                }
    gt.frames.push_back(gtFrame);

    // Camera ring on the +z side, looking at the origin.
    std::vector<Camera> cameras;
    for (int i = 0; i < cfg.nCameras; ++i) {
        const double az = 2.0 * 3.14159265358979323846 * i / cfg.nCameras;
        const real radius = real(1.1);
        const Vec3 pos(radius * real(std::cos(az)) * real(0.55),
                       radius * real(std::sin(az)) * real(0.55), radius * real(1.35));
        cameras.push_back(lookAtCamera(pos, Vec3(0, 0, 0), Vec3(0, 0, 1),
                                       real(1.15) * cfg.imageSize, cfg.imageSize, cfg.imageSize));
    }
    const std::string camerasPath = (dir / "cameras.json").string();
    saveCameras(cameras, camerasPath);

    // Backgrounds: deterministic per-camera gradients.
    Dataset ds;
    ds.camerasPath = camerasPath;
    for (int c = 0; c < cfg.nCameras; ++c) {
        Image bg(cfg.imageSize, cfg.imageSize, 3);
        for (int y = 0; y < bg.height; ++y)
            for (int x = 0; x < bg.width; ++x) {
                bg.at(x, y, 0) = real(0.15) + real(0.10) * real(x) / bg.width;
                bg.at(x, y, 1) = real(0.15) + real(0.10) * real(y) / bg.height;
                bg.at(x, y, 2) = real(0.20) + real(0.05) * real(c) / cfg.nCameras;
            }
        const std::string p = (dir / ("background_" + std::to_string(c) + ".vpim")).string();
        saveRawImage(bg, p);
        ds.backgroundPaths.push_back(p);
    }

    // Targets rendered by this artifact's own renderer.
    ds.entries.emplace_back();
    for (int c = 0; c < cfg.nCameras; ++c) {
        const RenderOutput out = render(gt, 0, cameras[c], gt.march);
        const Image bg = loadRawImage(ds.backgroundPaths[c]);
        const Image img = composite(out, bg);
        DatasetEntry e;
        e.present = true;
        e.targetRaw = (dir / ("target_f0_c" + std::to_string(c) + ".vpim")).string();
        e.targetPng = (dir / ("target_f0_c" + std::to_string(c) + ".png")).string();
        saveRawImage(img, e.targetRaw);
        savePng(img, e.targetPng);
        ds.entries[0].push_back(e);
    }
    ds.trackedMeshPaths.push_back(meshPath);
    for (int c = 0; c + 1 < cfg.nCameras; ++c) ds.trainCameras.push_back(c);
    ds.heldoutCameras.push_back(cfg.nCameras - 1);

    SyntheticResult result;
    result.datasetPath = (dir / "dataset.json").string();
    saveDataset(ds, result.datasetPath);

    SceneFile gtFile;
    gtFile.scene = gt;
    gtFile.meshPath = meshPath;
    gtFile.camerasPath = camerasPath;
    result.gtScenePath = (dir / "scene_gt.json").string();
    saveScene(gtFile, result.gtScenePath);

    // Initialization scene: zero deltas, flat gray payload.
    SceneFile initFile = gtFile;
    Frame &init = initFile.scene.frames[0];
    // Tiny per-primitive perturbations keep the initial faces non-coplanar.
    std::mt19937_64 initRng(cfg.seed + 17);
    for (auto &xf : init.transforms) {
        xf.deltaT = Vec3();
        xf.deltaR = Vec3(real(uni(initRng)), real(uni(initRng)), real(uni(initRng))) * real(0.02);
        xf.deltaS = Vec3(0, 0, -xf.sBase.z * real(0.45 + 0.1 * std::abs(uni(initRng))));
    }
    for (int k = 0; k < nPrim; ++k)
        for (int ch = 0; ch < 4; ++ch)
            for (int v = 0; v < cfg.m * cfg.m * cfg.m; ++v) {
                const int z = v / (cfg.m * cfg.m), y = (v / cfg.m) % cfg.m, x = v % cfg.m;
                init.slab.payload[init.slab.index(k, ch, z, y, x)] =
                    ch == 3 ? cfg.sigmaScale * real(0.25) : real(0.4);
            }
    initFile.slabPaths.clear();
    result.initScenePath = (dir / "scene_init.json").string();
    saveScene(initFile, result.initScenePath);
    return result;
}

} // namespace volprim
