// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "fit.h"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "errors.h"

namespace volprim {

using nlohmann::json;

FitConfig loadFitConfig(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open fit config: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw Error(ErrorCategory::Format, "fit config parse error: " + std::string(e.what()));
    }
    FitConfig cfg;
    if (doc.contains("weights")) {
        const auto &jw = doc["weights"];
        cfg.weights.pho = real(jw.value("pho", 1.0));
        cfg.weights.geo = real(jw.value("geo", 0.1));
        cfg.weights.vol = real(jw.value("vol", 0.01));
        cfg.weights.del = real(jw.value("del", 0.01));
    }
    if (doc.contains("adam")) {
        const auto &ja = doc["adam"];
        cfg.adam.lr = real(ja.value("lr", 1e-4));
        cfg.adam.beta1 = real(ja.value("beta1", 0.9));
        cfg.adam.beta2 = real(ja.value("beta2", 0.999));
        cfg.adam.eps = real(ja.value("eps", 1e-8));
        cfg.lrDecay = real(ja.value("lr_decay", 1.0));
        cfg.adam.lrDeltaScale = real(ja.value("lr_delta_scale", 1.0));
        cfg.adam.lrVertexScale = real(ja.value("lr_vertex_scale", 1.0));
    }
    cfg.iterations = doc.value("iterations", 5000);
    cfg.batchImages = doc.value("batch_images", 8);
    cfg.raysPerImage = doc.value("rays_per_image", 256);
    cfg.evalEvery = doc.value("eval_every", 250);
    cfg.seed = doc.value("seed", uint64_t(1));
    if (doc.contains("march")) {
        const auto &jm = doc["march"];
        cfg.march.stepSize = real(jm.value("stepsize", 0.001));
        cfg.march.earlyEps = real(jm.value("early_eps", 0.01));
        cfg.march.jitter = jm.value("jitter", false);
    }
    return cfg;
}

FitData loadFitData(const Dataset &ds, int frame) {
    if (frame < 0 || frame >= int(ds.entries.size()))
        throw Error(ErrorCategory::Usage, "dataset has no such frame");
    FitData data;
    data.cameras = loadCameras(ds.camerasPath);
    if (ds.backgroundPaths.size() != data.cameras.size())
        throw Error(ErrorCategory::Format, "need one background per camera");
    for (const auto &p : ds.backgroundPaths) data.backgrounds.push_back(loadRawImage(p));
    data.targets.resize(data.cameras.size());
    const auto &row = ds.entries[frame];
    if (row.size() != data.cameras.size())
        throw Error(ErrorCategory::Format, "dataset row does not match camera count");
    for (size_t c = 0; c < row.size(); ++c)
        if (row[c].present) data.targets[c] = loadRawImage(row[c].targetRaw);
    if (frame < int(ds.trackedMeshPaths.size())) {
        const GuideMesh tracked = loadObj(ds.trackedMeshPaths[frame]);
        data.trackedVerts = tracked.vertices;
    }
    data.trainCameras = ds.trainCameras;
    data.heldoutCameras = ds.heldoutCameras;
    if (data.trainCameras.empty())
        for (size_t c = 0; c < data.cameras.size(); ++c)
            if (row[c].present) data.trainCameras.push_back(int(c));
    return data;
}

std::vector<RaySample> sampleRays(const FitData &data, const std::vector<int> &cameraIndices,
                                  int raysPerImage, std::mt19937_64 &rng) {
    std::vector<RaySample> batch;
    for (int ci : cameraIndices) {
        const Image &target = data.targets[ci];
        const Image &bg = data.backgrounds[ci];
        const int64_t nPix = int64_t(target.width) * target.height;
        if (raysPerImage > nPix)
            throw Error(ErrorCategory::Usage, "rays_per_image exceeds pixel count");
        // Floyd's sampling without replacement.
        std::set<int64_t> chosen;
        for (int64_t j = nPix - raysPerImage; j < nPix; ++j) {
            const int64_t t = int64_t(rng() % uint64_t(j + 1));
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        for (int64_t p : chosen) {
            const int x = int(p % target.width);
            const int y = int(p / target.width);
            RaySample rs;
            rs.cameraIndex = ci;
            rs.pixel = Vec2(real(x) + real(0.5), real(y) + real(0.5));
            rs.pixelId = int(p);
            rs.target = Vec3(target.at(x, y, 0), target.at(x, y, 1), target.at(x, y, 2));
            rs.background = Vec3(bg.at(x, y, 0), bg.at(x, y, 1), bg.at(x, y, 2));
            batch.push_back(rs);
        }
    }
    return batch;
}

real psnr(const Image &a, const Image &b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw Error(ErrorCategory::Usage, "psnr dimension mismatch");
    double mse = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = double(a.data[i]) - double(b.data[i]);
        mse += d * d;
    }
    mse /= double(a.data.size());
    if (mse == 0) return std::numeric_limits<real>::infinity();
    return real(10.0 * std::log10(1.0 / mse));
}

real evalHeldout(const Scene &scene, int frame, const FitData &data, int camera,
                 const MarchConfig &cfg) {
    const RenderOutput out = render(scene, frame, data.cameras[camera], cfg);
    const Image img = composite(out, data.backgrounds[camera]);
    return psnr(img, data.targets[camera]);
}

FitResult fit(Scene &scene, int frame, const FitData &data, const FitConfig &cfg,
              const std::string &metricsCsv) {
    if (data.trainCameras.size() < 2)
        throw Error(ErrorCategory::Usage, "fit needs at least 2 training cameras");
    Frame &fr = scene.frames.at(frame);
    const ParamLayout layout = layoutOf(fr, scene.mesh.vertices.size());
    AdamState adam(layout.total(), cfg.adam);
    GradBuffer grads(layout);
    std::mt19937_64 rng(cfg.seed);

    std::ofstream csv;
    if (!metricsCsv.empty()) {
        csv.open(metricsCsv);
        if (!csv) throw Error(ErrorCategory::Io, "cannot write metrics: " + metricsCsv);
        csv << "iteration,L_pho,L_geo,L_vol,L_del,heldout_PSNR\n";
    }

    FitResult result;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // Exponential schedule: lr shrinks to lr*lrDecay over the run.
        if (cfg.lrDecay != 1 && cfg.iterations > 1)
            adam.config.lr =
                cfg.adam.lr * std::pow(cfg.lrDecay, real(iter) / real(cfg.iterations - 1));
        // Image batch for this iteration.
        std::vector<int> cams = data.trainCameras;
        if (cfg.batchImages < int(cams.size())) {
            for (size_t j = cams.size() - 1; j > 0; --j)
                std::swap(cams[j], cams[rng() % (j + 1)]);
            cams.resize(size_t(cfg.batchImages));
        }
        const std::vector<RaySample> batch = sampleRays(data, cams, cfg.raysPerImage, rng);

        grads.zero();
        const LossTerms terms = evalLoss(scene, frame, data.cameras, batch, data.trackedVerts,
                                         cfg.weights, cfg.march, &grads);
        if (!std::isfinite(terms.total())) {
            if (!metricsCsv.empty()) {
                std::ofstream dump(metricsCsv + ".abort");
                dump << "iteration " << iter << " loss " << terms.total() << "\n";
            }
            throw Error(ErrorCategory::Numeric, "loss diverged at iteration " + std::to_string(iter));
        }
        adamStep(fr, layout, grads, adam);

        real held = std::numeric_limits<real>::quiet_NaN();
        const bool evalNow =
            cfg.evalEvery > 0 && !data.heldoutCameras.empty() &&
            ((iter + 1) % cfg.evalEvery == 0 || iter + 1 == cfg.iterations);
        if (evalNow) {
            held = evalHeldout(scene, frame, data, data.heldoutCameras.front(), cfg.march);
            result.finalHeldoutPsnr = held;
        }
        result.log.push_back({iter, terms, held});
        result.finalPho = terms.pho;
        if (csv.is_open()) {
            csv << iter << "," << terms.pho << "," << terms.geo << "," << terms.vol << ","
                << terms.del << ",";
            if (std::isnan(double(held)))
                csv << "";
            else
                csv << held;
            csv << "\n";
        }
    }
    return result;
}

} // namespace volprim
