// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdio>
#include <random>

#include <CLI11.hpp>

#include "volprim/errors.h"
#include "volprim/fit.h"
#include "volprim/synthetic.h"

using namespace volprim;

namespace {

int runRender(const std::string &scenePath, int cameraIdx, int frame, double stepsize,
              double earlyEps, bool jitter, uint64_t seed, const std::string &outPng,
              const std::string &outRaw, const std::string &backgroundPath) {
    SceneFile file = loadScene(scenePath);
    const std::vector<Camera> cams = loadCameras(file.camerasPath);
    if (cameraIdx < 0 || cameraIdx >= int(cams.size()))
        throw volprim::Error(volprim::ErrorCategory::Usage, "camera index out of range");
    MarchConfig cfg = file.scene.march;
    if (stepsize > 0) cfg.stepSize = real(stepsize);
    if (earlyEps > 0) cfg.earlyEps = real(earlyEps);
    cfg.jitter = jitter;
    cfg.seed = seed;
    const RenderOutput out = render(file.scene, frame, cams[cameraIdx], cfg);
    Image img = out.color;
    if (!backgroundPath.empty()) img = composite(out, loadRawImage(backgroundPath));
    if (!outPng.empty()) savePng(img, outPng);
    if (!outRaw.empty()) saveRawImage(img, outRaw);
    std::printf("rendered %dx%d, %lld samples\n", img.width, img.height,
                (long long)out.totalSamples());
    return 0;
}

int runFit(const std::string &scenePath, const std::string &datasetPath, int frame,
           const std::string &configPath, const std::string &outScene,
           const std::string &metricsCsv, int iterations, uint64_t seed) {
    SceneFile file = loadScene(scenePath);
    const Dataset ds = loadDataset(datasetPath);
    const FitData data = loadFitData(ds, frame);
    FitConfig cfg;
    if (configPath.empty())
        cfg.march = file.scene.march;
    else
        cfg = loadFitConfig(configPath);
    if (iterations > 0) cfg.iterations = iterations;
    if (seed != 0) cfg.seed = seed;
    const FitResult result = fit(file.scene, frame, data, cfg, metricsCsv);
    std::printf("final L_pho %.6g, held-out PSNR %.2f dB\n", double(result.finalPho),
                double(result.finalHeldoutPsnr));
    if (!outScene.empty()) {
        file.slabPaths.clear();
        saveScene(file, outScene);
    }
    return 0;
}

int runGradcheck(const std::string &scenePath, const std::string &datasetPath, int frame,
                 int nParams, int nRays, uint64_t seed, double tol) {
    SceneFile file = loadScene(scenePath);
    const Dataset ds = loadDataset(datasetPath);
    const FitData data = loadFitData(ds, frame);

    std::mt19937_64 rng(seed);
    std::vector<int> camIdx = data.trainCameras;
    std::vector<RaySample> batch = sampleRays(data, camIdx, std::max(1, nRays / int(camIdx.size())),
                                              rng);
    LossWeights weights;
    MarchConfig cfg = file.scene.march;
    cfg.earlyEps = real(1e-9); // keep the loss smooth for differencing
    const GradcheckReport report = gradcheck(file.scene, frame, data.cameras, batch,
                                             data.trackedVerts, weights, cfg, nParams, seed);

    bool pass = true;
    std::printf("%-16s %12s %10s\n", "group", "max_rel_err", "tolerance");
    for (ParamGroup g : {ParamGroup::PayloadRgb, ParamGroup::PayloadSigma, ParamGroup::DeltaT,
                         ParamGroup::DeltaR, ParamGroup::DeltaS, ParamGroup::VertexOffset}) {
        const real err = report.maxRelError(g);
        const bool ok = err < real(tol);
        pass = pass && ok;
        std::printf("%-16s %12.3e %10.1e %s\n", paramGroupName(g), double(err), tol,
                    ok ? "pass" : "FAIL");
    }
    std::printf("%d parameters checked, overall %s\n", int(report.entries.size()),
                pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
}

int runBench(int maxPrims, const std::string &outCsv) {
    std::FILE *out = outCsv.empty() ? stdout : std::fopen(outCsv.c_str(), "w");
    if (!out) throw volprim::Error(volprim::ErrorCategory::Io, "cannot write bench csv");
    std::fprintf(out, "N_prim,build_ms,rays_per_sec\n");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int n = 64; n <= maxPrims; n *= 4) {
        std::vector<Aabb> boxes;
        std::vector<AffineXf> xfs;
        for (int i = 0; i < n; ++i) {
            AffineXf xf;
            xf.t = Vec3(real(uni(rng)), real(uni(rng)), real(uni(rng)));
            xf.rot = rotationFromAxisAngle(
                         Vec3(real(uni(rng)), real(uni(rng)), real(uni(rng))))
                         .matrix;
            xf.scale = Vec3(real(0.05), real(0.05), real(0.05));
            xfs.push_back(xf);
            boxes.push_back(primitiveAabb(xf));
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Lbvh bvh = buildLbvh(boxes);
        const auto t1 = std::chrono::steady_clock::now();
        const int nRays = 20000;
        size_t hits = 0;
        for (int i = 0; i < nRays; ++i) {
            Ray ray;
            ray.origin = Vec3(real(uni(rng)) * 3, real(uni(rng)) * 3, real(-4));
            ray.direction = normalize(Vec3(real(uni(rng)) * real(0.3),
                                           real(uni(rng)) * real(0.3), 1));
            hits += intersect(bvh, xfs, ray).segments.size();
        }
        const auto t2 = std::chrono::steady_clock::now();
        const double buildMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
        const double raysPerSec = nRays / std::chrono::duration<double>(t2 - t1).count();
        std::fprintf(out, "%d,%.4f,%.0f\n", n, buildMs, raysPerSec);
    }
    if (out != stdout) std::fclose(out);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"volumetric-primitive renderer and inverse-rendering fitter"};
    app.require_subcommand(1);

    // render
    auto *render = app.add_subcommand("render", "render one camera view of a scene");
    std::string scenePath, outPng, outRaw, backgroundPath;
    int cameraIdx = 0, frame = 0;
    double stepsize = 0, earlyEps = 0;
    bool jitter = false;
    uint64_t seed = 1;
    render->add_option("--scene", scenePath)->required();
    render->add_option("--camera", cameraIdx);
    render->add_option("--frame", frame);
    render->add_option("--stepsize", stepsize);
    render->add_option("--early-eps", earlyEps);
    render->add_flag("--jitter", jitter);
    render->add_option("--seed", seed);
    render->add_option("--out", outPng);
    render->add_option("--raw", outRaw);
    render->add_option("--background", backgroundPath);

    // fit
    auto *fitCmd = app.add_subcommand("fit", "fit a scene to a dataset");
    std::string datasetPath, fitConfigPath, fitOutScene, metricsCsv;
    int iterations = 0;
    fitCmd->add_option("--scene", scenePath)->required();
    fitCmd->add_option("--dataset", datasetPath)->required();
    fitCmd->add_option("--frame", frame);
    fitCmd->add_option("--config", fitConfigPath);
    fitCmd->add_option("--out", fitOutScene);
    fitCmd->add_option("--metrics", metricsCsv);
    fitCmd->add_option("--iterations", iterations);
    fitCmd->add_option("--seed", seed);

    // gradcheck
    auto *gradCmd = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
    int nParams = 60, nRays = 64;
    double tol = sizeof(real) == 8 ? 1e-5 : 1e-3;
    gradCmd->add_option("--scene", scenePath)->required();
    gradCmd->add_option("--dataset", datasetPath)->required();
    gradCmd->add_option("--frame", frame);
    gradCmd->add_option("--params", nParams);
    gradCmd->add_option("--rays", nRays);
    gradCmd->add_option("--seed", seed);
    gradCmd->add_option("--tol", tol);

    // bench
    auto *benchCmd = app.add_subcommand("bench", "BVH build / traversal throughput");
    int maxPrims = 4096;
    std::string benchCsv;
    benchCmd->add_option("--max-prims", maxPrims);
    benchCmd->add_option("--out", benchCsv);

    // make-synthetic
    auto *makeCmd = app.add_subcommand("make-synthetic", "generate a synthetic dataset");
    SyntheticConfig synth;
    double misalign = 0, sigmaScale = 8, synthStep = 0.002;
    makeCmd->add_option("--out", synth.outDir)->required();
    makeCmd->add_option("--prims", synth.nPrim);
    makeCmd->add_option("--voxels", synth.m);
    makeCmd->add_option("--cameras", synth.nCameras);
    makeCmd->add_option("--size", synth.imageSize);
    makeCmd->add_option("--seed", synth.seed);
    makeCmd->add_option("--misalign", misalign);
    makeCmd->add_option("--sigma", sigmaScale);
    makeCmd->add_option("--stepsize", synthStep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed())
            return runRender(scenePath, cameraIdx, frame, stepsize, earlyEps, jitter, seed, outPng,
                             outRaw, backgroundPath);
        if (fitCmd->parsed())
            return runFit(scenePath, datasetPath, frame, fitConfigPath, fitOutScene, metricsCsv,
                          iterations, seed);
        if (gradCmd->parsed())
            return runGradcheck(scenePath, datasetPath, frame, nParams, nRays, seed, tol);
        if (benchCmd->parsed()) return runBench(maxPrims, benchCsv);
        if (makeCmd->parsed()) {
            synth.misalignment = real(misalign);
            synth.sigmaScale = real(sigmaScale);
            synth.stepSize = real(synthStep);
            const SyntheticResult r = makeSynthetic(synth);
            std::printf("dataset: %s\ninit scene: %s\ngt scene: %s\n", r.datasetPath.c_str(),
                        r.initScenePath.c_str(), r.gtScenePath.c_str());
            return 0;
        }
    } catch (const volprim::Error &e) {
        std::fprintf(stderr, "error [%s]: %s\n", categoryName(e.category()), e.what());
        return e.exitCode();
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
