// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "scene.h"

namespace volprim {

/// Scene JSON (version 1): guide mesh and camera paths, window and march
/// parameters, and per-frame transforms with a sidecar slab blob per frame.
/// The slab blob ("VPSL") stores the header {magic, version, N_prim, M}
/// followed by f32 payload in k-major, channel-major, z,y,x order.
struct SceneFile {
    Scene scene;
    std::string meshPath;
    std::string camerasPath;
    std::vector<std::string> slabPaths; // one per frame
};

SceneFile loadScene(const std::string &path);
/// Writes the scene JSON and one slab blob per frame next to it.
void saveScene(const SceneFile &file, const std::string &path);

void saveSlab(const PrimitiveSlab &slab, const std::string &path);
PrimitiveSlab loadSlab(const std::string &path);

/// Dataset JSON: per (frame, camera) target and background image paths plus a
/// tracked mesh per frame. Holes are explicit nulls.
struct DatasetEntry {
    bool present = false;
    std::string targetRaw;  // lossless float target
    std::string targetPng;  // preview
};

struct Dataset {
    std::string camerasPath;
    std::vector<std::string> backgroundPaths; // per camera
    std::vector<std::string> trackedMeshPaths; // per frame
    std::vector<std::vector<DatasetEntry>> entries; // [frame][camera]
    std::vector<int> trainCameras;
    std::vector<int> heldoutCameras;
};

Dataset loadDataset(const std::string &path);
void saveDataset(const Dataset &ds, const std::string &path);

/// Resolves a path found in a JSON document relative to that document.
std::string resolveRelative(const std::string &docPath, const std::string &ref);

} // namespace volprim
