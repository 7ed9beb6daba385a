// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "math.h"

namespace volprim {

/// Row-major float image, channel-interleaved.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<real> data;

    Image() = default;
    Image(int w, int h, int c) : width(w), height(h), channels(c), data(size_t(w) * h * c, 0) {}

    real &at(int x, int y, int c) { return data[(size_t(y) * width + x) * channels + c]; }
    real at(int x, int y, int c) const { return data[(size_t(y) * width + x) * channels + c]; }
};

/// Lossless float container ("VPIM"): magic, version, width, height, channels,
/// then f32 samples row-major. Used for test fixtures and fit targets.
void saveRawImage(const Image &img, const std::string &path);
Image loadRawImage(const std::string &path);

/// 8-bit sRGB PNG with a fixed gamma 2.2 encode; 1 channel writes grayscale,
/// 3 writes RGB.
void savePng(const Image &img, const std::string &path);

} // namespace volprim
