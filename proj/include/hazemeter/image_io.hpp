#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hazemeter/image.hpp"

namespace haze::io {

// 8-bit coded image (pixel brightness codes 0..255) for the radiometric path.
struct CodedImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;  // row-major, interleaved rgb

    std::uint8_t at(int r, int c, int ch) const {
        return data[(static_cast<size_t>(r) * width + c) * 3 + ch];
    }
    std::uint8_t& at(int r, int c, int ch) {
        return data[(static_cast<size_t>(r) * width + c) * 3 + ch];
    }
};

// PNG or uncompressed TIFF, chosen by extension. Integer codes are divided by
// the max code value (255 or 65535) on load. Grayscale files are replicated
// across channels.
LinearImage load_image(const std::filesystem::path& path);

// Writes PNG or uncompressed TIFF (by extension); values are clamped to [0,1]
// and quantized. 16-bit is the default and the preferred round-trip format.
void save_image(const std::filesystem::path& path, const LinearImage& img, int bit_depth = 16);

// Single-channel variant for transmission/depth maps.
ScalarMap load_map(const std::filesystem::path& path);
void save_map(const std::filesystem::path& path, const ScalarMap& map, int bit_depth = 16);

// 8-bit codes for radiometric linearization; rejects 16-bit files.
CodedImage load_coded8(const std::filesystem::path& path);
void save_coded8(const std::filesystem::path& path, const CodedImage& img);

// Raw float dump: 16-byte header (magic "HZB1", u32 height, u32 width,
// u32 channels, little-endian) followed by height*width*channels float64
// values. Lossless intermediate storage.
void save_hzb(const std::filesystem::path& path, const LinearImage& img);
void save_hzb(const std::filesystem::path& path, const ScalarMap& map);
LinearImage load_hzb(const std::filesystem::path& path);
ScalarMap load_hzb_map(const std::filesystem::path& path);

}  // namespace haze::io
