// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#include "image.h"

#include <cstring>
#include <fstream>

#include <zlib.h>

#include "errors.h"

namespace volprim {

static constexpr char kRawMagic[4] = {'V', 'P', 'I', 'M'};
static constexpr uint32_t kRawVersion = 1;

static void writeU32(std::ostream &out, uint32_t v) {
    out.write(reinterpret_cast<const char *>(&v), 4);
}

static uint32_t readU32(std::istream &in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char *>(&v), 4);
    return v;
}

void saveRawImage(const Image &img, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Io, "cannot write image: " + path);
    out.write(kRawMagic, 4);
    writeU32(out, kRawVersion);
    writeU32(out, uint32_t(img.width));
    writeU32(out, uint32_t(img.height));
    writeU32(out, uint32_t(img.channels));
    for (real v : img.data) {
        const float f = float(v);
        out.write(reinterpret_cast<const char *>(&f), 4);
    }
    if (!out) throw Error(ErrorCategory::Io, "short write: " + path);
}

Image loadRawImage(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCategory::Io, "cannot open image: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kRawMagic, 4) != 0)
        throw Error(ErrorCategory::Format, "not a VPIM image: " + path);
    const uint32_t version = readU32(in);
    if (version != kRawVersion)
        throw Error(ErrorCategory::Version,
                    "unsupported VPIM version " + std::to_string(version));
    const uint32_t w = readU32(in), h = readU32(in), c = readU32(in);
    if (!in || w == 0 || h == 0 || c == 0 || c > 4 || w > 1u << 20 || h > 1u << 20)
        throw Error(ErrorCategory::Format, "bad VPIM header: " + path);
    Image img{int(w), int(h), int(c)};
    for (real &v : img.data) {
        float f;
        in.read(reinterpret_cast<char *>(&f), 4);
        v = real(f);
    }
    if (!in) throw Error(ErrorCategory::Format, "truncated VPIM payload: " + path);
    return img;
}

namespace {

void pngChunk(std::ostream &out, const char type[4], const std::vector<unsigned char> &data) {
    auto be32 = [&](uint32_t v) {
        unsigned char b[4] = {(unsigned char)(v >> 24), (unsigned char)(v >> 16),
                              (unsigned char)(v >> 8), (unsigned char)v};
        out.write(reinterpret_cast<char *>(b), 4);
    };
    be32(uint32_t(data.size()));
    out.write(type, 4);
    if (!data.empty()) out.write(reinterpret_cast<const char *>(data.data()), data.size());
    uint32_t crc = crc32(0, reinterpret_cast<const Bytef *>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), uInt(data.size()));
    be32(crc);
}

} // namespace

void savePng(const Image &img, const std::string &path) {
    if (img.channels != 1 && img.channels != 3)
        throw Error(ErrorCategory::Usage, "PNG output supports 1 or 3 channels");
    const int w = img.width, h = img.height, c = img.channels;

    // Filter byte 0 per scanline, gamma 2.2 encode.
    std::vector<unsigned char> rawData(size_t(h) * (size_t(w) * c + 1));
    size_t pos = 0;
    for (int y = 0; y < h; ++y) {
        rawData[pos++] = 0;
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                const real v = clamp(img.at(x, y, ch), 0, 1);
                const real enc = std::pow(v, real(1.0 / 2.2));
                rawData[pos++] = (unsigned char)(std::lround(double(enc) * 255.0));
            }
    }

    uLongf compLen = compressBound(uLong(rawData.size()));
    std::vector<unsigned char> comp(compLen);
    if (compress2(comp.data(), &compLen, rawData.data(), uLong(rawData.size()), 6) != Z_OK)
        throw Error(ErrorCategory::Io, "zlib compression failed");
    comp.resize(compLen);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Io, "cannot write png: " + path);
    static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.write(reinterpret_cast<const char *>(sig), 8);

    std::vector<unsigned char> ihdr(13);
    auto putBe = [&](size_t off, uint32_t v) {
        ihdr[off] = (unsigned char)(v >> 24);
        ihdr[off + 1] = (unsigned char)(v >> 16);
        ihdr[off + 2] = (unsigned char)(v >> 8);
        ihdr[off + 3] = (unsigned char)v;
    };
    putBe(0, uint32_t(w));
    putBe(4, uint32_t(h));
    ihdr[8] = 8;                       // bit depth
    ihdr[9] = c == 1 ? 0 : 2;          // grayscale / truecolor
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    pngChunk(out, "IHDR", ihdr);
    pngChunk(out, "IDAT", comp);
    pngChunk(out, "IEND", {});
    if (!out) throw Error(ErrorCategory::Io, "short png write: " + path);
}

} // namespace volprim
